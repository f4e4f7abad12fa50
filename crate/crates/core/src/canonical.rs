//! Closed-world canonical interpretation of an ABox.
//!
//! The domain is exactly the named individuals (unique names), roles are
//! exactly the asserted pairs, and concept names hold for the asserted
//! individuals closed under told subsumers. Concepts are evaluated by
//! structural recursion over this finite interpretation; a defined name
//! covers both its told members and the members of its definition body.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use fixedbitset::FixedBitSet;

use crate::concept::Concept;
use crate::error::Result;
use crate::kb::{DefinitionKind, KnowledgeBase, TBox};

/// Told concept names per individual.
///
/// Least fixpoint of: asserted names, plus every name that occurs as a
/// (possibly nested) top-level conjunct of the body of a name already in the
/// set. Disjunctions and role restrictions contribute nothing.
pub fn told_closure(k: &KnowledgeBase) -> Result<BTreeMap<String, BTreeSet<String>>> {
    k.tbox.check_acyclic()?;
    let mut out: BTreeMap<String, BTreeSet<String>> =
        k.individuals().iter().map(|a| (a.clone(), BTreeSet::new())).collect();
    for ca in k.abox.concept_assertions() {
        let set = out.get_mut(&ca.individual).expect("assertion individuals are registered");
        let mut stack = vec![ca.concept.clone()];
        while let Some(name) = stack.pop() {
            if !set.insert(name.clone()) {
                continue;
            }
            if let Some(def) = k.tbox.get(&name) {
                collect_conjunct_names(&def.body, &mut stack);
            }
        }
    }
    Ok(out)
}

fn collect_conjunct_names(c: &Concept, out: &mut Vec<String>) {
    match c {
        Concept::Atom(n) => out.push(n.clone()),
        Concept::And(cs) => cs.iter().for_each(|c| collect_conjunct_names(c, out)),
        _ => {}
    }
}

/// Finite interpretation with the named individuals as domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalModel {
    domain: Vec<String>,
    index: HashMap<String, usize>,
    concept_ext: BTreeMap<String, FixedBitSet>,
    role_succ: BTreeMap<String, Vec<Vec<usize>>>,
}

impl CanonicalModel {
    pub fn build(k: &KnowledgeBase) -> Result<Self> {
        let told = told_closure(k)?;
        let domain: Vec<String> = k.individuals().iter().cloned().collect();
        let n = domain.len();
        let index: HashMap<String, usize> = domain.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let mut concept_ext: BTreeMap<String, FixedBitSet> = BTreeMap::new();
        for (a, names) in &told {
            for name in names {
                concept_ext.entry(name.clone()).or_insert_with(|| FixedBitSet::with_capacity(n)).insert(index[a]);
            }
        }
        let mut role_succ: BTreeMap<String, Vec<Vec<usize>>> = BTreeMap::new();
        for ra in k.abox.role_assertions() {
            let succ = role_succ.entry(ra.role.clone()).or_insert_with(|| vec![Vec::new(); n]);
            succ[index[&ra.subject]].push(index[&ra.object]);
        }
        for succ in role_succ.values_mut().flat_map(|v| v.iter_mut()) {
            succ.sort_unstable();
            succ.dedup();
        }
        Ok(CanonicalModel { domain, index, concept_ext, role_succ })
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    /// Told extension of a concept name.
    pub fn primitive_ext(&self, name: &str) -> BTreeSet<&str> {
        self.names(self.concept_ext.get(name))
    }

    /// Asserted pairs of a role.
    pub fn role_ext(&self, role: &str) -> BTreeSet<(&str, &str)> {
        let mut out = BTreeSet::new();
        if let Some(succ) = self.role_succ.get(role) {
            for (x, ys) in succ.iter().enumerate() {
                for &y in ys {
                    out.insert((self.domain[x].as_str(), self.domain[y].as_str()));
                }
            }
        }
        out
    }

    /// Asserted `role`-successors of `a`, or an empty slice.
    pub fn successors(&self, role: &str, a: &str) -> Vec<&str> {
        match (self.role_succ.get(role), self.index.get(a)) {
            (Some(succ), Some(&i)) => succ[i].iter().map(|&j| self.domain[j].as_str()).collect(),
            _ => Vec::new(),
        }
    }

    pub fn contains(&self, a: &str) -> bool {
        self.index.contains_key(a)
    }

    fn names(&self, set: Option<&FixedBitSet>) -> BTreeSet<&str> {
        set.map(|s| s.ones().map(|i| self.domain[i].as_str()).collect()).unwrap_or_default()
    }

    /// Extension of `c` in this interpretation.
    pub fn eval(&self, t: &TBox, c: &Concept) -> BTreeSet<String> {
        self.eval_bits(t, c).ones().map(|i| self.domain[i].clone()).collect()
    }

    fn empty(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.domain.len())
    }

    fn full(&self) -> FixedBitSet {
        let mut s = self.empty();
        s.insert_range(..);
        s
    }

    fn eval_bits(&self, t: &TBox, c: &Concept) -> FixedBitSet {
        match c {
            Concept::Top => self.full(),
            Concept::Bottom => self.empty(),
            Concept::Atom(name) => {
                let mut s = self.concept_ext.get(name).cloned().unwrap_or_else(|| self.empty());
                if let Some(def) = t.get(name) {
                    if def.kind == DefinitionKind::Equiv {
                        s.union_with(&self.eval_bits(t, &def.body));
                    }
                }
                s
            }
            Concept::Not(inner) => {
                let mut s = self.eval_bits(t, inner);
                s.toggle_range(..);
                s
            }
            Concept::And(cs) => {
                let mut s = self.full();
                for c in cs {
                    s.intersect_with(&self.eval_bits(t, c));
                }
                s
            }
            Concept::Or(cs) => {
                let mut s = self.empty();
                for c in cs {
                    s.union_with(&self.eval_bits(t, c));
                }
                s
            }
            Concept::Exists(r, f) => {
                let fs = self.eval_bits(t, f);
                self.select(r, |ys| ys.iter().any(|&y| fs.contains(y)))
            }
            Concept::Forall(r, f) => {
                let fs = self.eval_bits(t, f);
                let mut s = self.select(r, |ys| ys.iter().all(|&y| fs.contains(y)));
                // Individuals without any r-successor satisfy it vacuously.
                if !self.role_succ.contains_key(r) {
                    s = self.full();
                }
                s
            }
            Concept::AtLeast(n, r) => self.select(r, |ys| ys.len() >= *n as usize),
        }
    }

    fn select(&self, role: &str, pred: impl Fn(&[usize]) -> bool) -> FixedBitSet {
        let mut s = self.empty();
        if let Some(succ) = self.role_succ.get(role) {
            for (x, ys) in succ.iter().enumerate() {
                if pred(ys) {
                    s.insert(x);
                }
            }
        }
        s
    }

    /// Whether this interpretation is a model of `k`: every assertion holds,
    /// full definitions match their bodies and partial definitions are
    /// contained in theirs.
    pub fn satisfies(&self, k: &KnowledgeBase) -> bool {
        let t = &k.tbox;
        for (name, def) in t.iter() {
            let told = self.concept_ext.get(name).cloned().unwrap_or_else(|| self.empty());
            let body = self.eval_bits(t, &def.body);
            if !told.is_subset(&body) {
                return false;
            }
        }
        k.abox.concept_assertions().all(|ca| self.eval(t, &Concept::atom(ca.concept.as_str())).contains(&ca.individual))
    }
}

pub fn build_canonical(k: &KnowledgeBase) -> Result<CanonicalModel> {
    CanonicalModel::build(k)
}

pub fn eval_concept(m: &CanonicalModel, t: &TBox, c: &Concept) -> BTreeSet<String> {
    m.eval(t, c)
}

/// Extension of `c` in the canonical interpretation of `k`.
pub fn retrieve_canonical(k: &KnowledgeBase, c: &Concept) -> Result<BTreeSet<String>> {
    Ok(CanonicalModel::build(k)?.eval(&k.tbox, c))
}
