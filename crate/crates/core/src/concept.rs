//! Concept descriptions and their syntactic transformations.
//!
//! The constructor set is ALC plus an unqualified at-least restriction
//! `atleast n R`. Everything here is purely syntactic: negation normal form,
//! simplification to a canonical shape, and structural depth. Expansion of
//! defined names lives in [`crate::kb`].

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Top,
    Bottom,
    Atom(String),
    Not(Box<Concept>),
    /// Conjunction. Built through [`Concept::and`], which keeps at least two operands.
    And(Vec<Concept>),
    /// Disjunction. Built through [`Concept::or`], which keeps at least two operands.
    Or(Vec<Concept>),
    Exists(String, Box<Concept>),
    Forall(String, Box<Concept>),
    /// `atleast n R`: at least `n` distinct `R`-successors, `n >= 1`.
    AtLeast(u32, String),
}

impl Concept {
    pub fn atom(name: impl Into<String>) -> Self {
        Concept::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Concept) -> Self {
        Concept::Not(Box::new(c))
    }

    /// Conjunction of `args`; an empty list yields `Top` and a singleton yields its element.
    pub fn and(mut args: Vec<Concept>) -> Self {
        match args.len() {
            0 => Concept::Top,
            1 => args.pop().unwrap(),
            _ => Concept::And(args),
        }
    }

    /// Disjunction of `args`; an empty list yields `Bottom` and a singleton yields its element.
    pub fn or(mut args: Vec<Concept>) -> Self {
        match args.len() {
            0 => Concept::Bottom,
            1 => args.pop().unwrap(),
            _ => Concept::Or(args),
        }
    }

    pub fn exists(role: impl Into<String>, filler: Concept) -> Self {
        Concept::Exists(role.into(), Box::new(filler))
    }

    pub fn forall(role: impl Into<String>, filler: Concept) -> Self {
        Concept::Forall(role.into(), Box::new(filler))
    }

    /// # Panics
    /// Panics if `n == 0`.
    pub fn at_least(n: u32, role: impl Into<String>) -> Self {
        assert!(n >= 1, "atleast requires n >= 1");
        Concept::AtLeast(n, role.into())
    }

    /// Negation normal form.
    ///
    /// Fails with [`Error::UnsupportedNegation`] when a negated `atleast n R`
    /// with `n >= 2` has to be pushed inward, since no at-most constructor
    /// exists. `not atleast 1 R` becomes `forall R.Bottom`.
    pub fn nnf(&self) -> Result<Concept> {
        push_negation(self, false, true)
    }

    /// Like [`Concept::nnf`] but leaves `not atleast n R` (`n >= 2`) in place.
    pub(crate) fn nnf_lenient(&self) -> Concept {
        push_negation(self, false, false).expect("lenient nnf is total")
    }

    /// Rewrites to a canonical, semantically equivalent form.
    ///
    /// Runs to a fixpoint: negation normal form, flattening of nested
    /// conjunctions and disjunctions, merging of `forall R` conjuncts over the
    /// same role, unit and absorbing element handling for `Top`/`Bottom`,
    /// removal of duplicate operands and a stable operand order.
    pub fn normalize(&self) -> Concept {
        let mut cur = self.nnf_lenient();
        loop {
            let next = simplify(&cur);
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// Maximal nesting of role restrictions.
    pub fn depth(&self) -> usize {
        match self {
            Concept::Top | Concept::Bottom | Concept::Atom(_) => 0,
            Concept::AtLeast(..) => 1,
            Concept::Not(c) => c.depth(),
            Concept::And(cs) | Concept::Or(cs) => cs.iter().map(Concept::depth).max().unwrap_or(0),
            Concept::Exists(_, c) | Concept::Forall(_, c) => 1 + c.depth(),
        }
    }

    /// Whether negation occurs only directly above atoms.
    pub fn is_nnf(&self) -> bool {
        match self {
            Concept::Top | Concept::Bottom | Concept::Atom(_) | Concept::AtLeast(..) => true,
            Concept::Not(c) => matches!(**c, Concept::Atom(_)),
            Concept::And(cs) | Concept::Or(cs) => cs.iter().all(Concept::is_nnf),
            Concept::Exists(_, c) | Concept::Forall(_, c) => c.is_nnf(),
        }
    }

    /// Concept names occurring in the expression.
    pub fn concept_names(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.visit(&mut |c| {
            if let Concept::Atom(n) = c {
                out.insert(n.as_str());
            }
        });
        out
    }

    /// Role names occurring in the expression.
    pub fn role_names(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.visit(&mut |c| match c {
            Concept::Exists(r, _) | Concept::Forall(r, _) | Concept::AtLeast(_, r) => {
                out.insert(r.as_str());
            }
            _ => {}
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Concept)) {
        f(self);
        match self {
            Concept::Not(c) | Concept::Exists(_, c) | Concept::Forall(_, c) => c.visit(f),
            Concept::And(cs) | Concept::Or(cs) => cs.iter().for_each(|c| c.visit(f)),
            _ => {}
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 0: disjunction context, 1: conjunction operand, 2: unary operand.
        match self {
            Concept::Top => f.write_str("Top"),
            Concept::Bottom => f.write_str("Bottom"),
            Concept::Atom(n) => f.write_str(n),
            Concept::AtLeast(n, r) => write!(f, "atleast {n} {r}"),
            Concept::Not(c) => {
                f.write_str("not ")?;
                c.fmt_prec(f, 2)
            }
            Concept::Exists(r, c) => {
                write!(f, "exists {r}.")?;
                c.fmt_prec(f, 2)
            }
            Concept::Forall(r, c) => {
                write!(f, "forall {r}.")?;
                c.fmt_prec(f, 2)
            }
            Concept::And(cs) => fmt_nary(f, cs, " and ", 2, prec > 1),
            Concept::Or(cs) => fmt_nary(f, cs, " or ", 1, prec > 0),
        }
    }
}

fn fmt_nary(f: &mut fmt::Formatter<'_>, cs: &[Concept], sep: &str, child: u8, paren: bool) -> fmt::Result {
    if paren {
        f.write_str("(")?;
    }
    for (i, c) in cs.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        c.fmt_prec(f, child)?;
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

fn push_negation(c: &Concept, neg: bool, strict: bool) -> Result<Concept> {
    let all = |cs: &[Concept], neg: bool| -> Result<Vec<Concept>> {
        cs.iter().map(|c| push_negation(c, neg, strict)).collect()
    };
    Ok(match (c, neg) {
        (Concept::Top, false) | (Concept::Bottom, true) => Concept::Top,
        (Concept::Top, true) | (Concept::Bottom, false) => Concept::Bottom,
        (Concept::Atom(_), false) | (Concept::AtLeast(..), false) => c.clone(),
        (Concept::Atom(_), true) => Concept::not(c.clone()),
        (Concept::AtLeast(1, r), true) => Concept::forall(r.clone(), Concept::Bottom),
        (Concept::AtLeast(n, r), true) => {
            if strict {
                return Err(Error::UnsupportedNegation { n: *n, role: r.clone() });
            }
            Concept::not(c.clone())
        }
        (Concept::Not(inner), _) => push_negation(inner, !neg, strict)?,
        (Concept::And(cs), false) => Concept::And(all(cs, false)?),
        (Concept::And(cs), true) => Concept::Or(all(cs, true)?),
        (Concept::Or(cs), false) => Concept::Or(all(cs, false)?),
        (Concept::Or(cs), true) => Concept::And(all(cs, true)?),
        (Concept::Exists(r, f), false) => Concept::exists(r.clone(), push_negation(f, false, strict)?),
        (Concept::Exists(r, f), true) => Concept::forall(r.clone(), push_negation(f, true, strict)?),
        (Concept::Forall(r, f), false) => Concept::forall(r.clone(), push_negation(f, false, strict)?),
        (Concept::Forall(r, f), true) => Concept::exists(r.clone(), push_negation(f, true, strict)?),
    })
}

/// One simplification pass over an NNF concept.
fn simplify(c: &Concept) -> Concept {
    match c {
        Concept::Exists(r, f) => Concept::exists(r.clone(), simplify(f)),
        Concept::Forall(r, f) => Concept::forall(r.clone(), simplify(f)),
        Concept::And(cs) => {
            let mut flat = Vec::with_capacity(cs.len());
            for c in cs.iter().map(simplify) {
                match c {
                    Concept::And(inner) => flat.extend(inner),
                    Concept::Top => {}
                    Concept::Bottom => return Concept::Bottom,
                    other => flat.push(other),
                }
            }
            // Merge `forall R.C1 and forall R.C2` into `forall R.(C1 and C2)`,
            // keeping the position of the first occurrence.
            let mut merged: Vec<Concept> = Vec::with_capacity(flat.len());
            for c in flat {
                if let Concept::Forall(r, f) = &c {
                    let slot = merged.iter_mut().find(|m| matches!(m, Concept::Forall(r2, _) if r2 == r));
                    if let Some(Concept::Forall(_, g)) = slot {
                        let prev = std::mem::replace(g.as_mut(), Concept::Top);
                        **g = match prev {
                            Concept::And(mut gs) => {
                                gs.push((**f).clone());
                                Concept::And(gs)
                            }
                            other => Concept::And(vec![other, (**f).clone()]),
                        };
                        continue;
                    }
                }
                merged.push(c);
            }
            Concept::and(canonical_order(merged))
        }
        Concept::Or(cs) => {
            let mut flat = Vec::with_capacity(cs.len());
            for c in cs.iter().map(simplify) {
                match c {
                    Concept::Or(inner) => flat.extend(inner),
                    Concept::Bottom => {}
                    Concept::Top => return Concept::Top,
                    other => flat.push(other),
                }
            }
            Concept::or(canonical_order(flat))
        }
        other => other.clone(),
    }
}

/// Sorts operands by their printed form and drops duplicates.
fn canonical_order(cs: Vec<Concept>) -> Vec<Concept> {
    let mut keyed: Vec<(String, Concept)> = cs.into_iter().map(|c| (c.to_string(), c)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    keyed.dedup_by(|a, b| a.1 == b.1);
    keyed.into_iter().map(|(_, c)| c).collect()
}
