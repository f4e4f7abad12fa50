//! Open-world reasoning by a tableau procedure over unfolded, NNF concepts.
//!
//! Deterministic rules (conjunction, universal propagation, existential and
//! at-least successor creation) run to saturation before any disjunction is
//! split; disjunctions are explored depth first with dependency-directed
//! backjumping. Terminologies are acyclic and fully unfolded, so no blocking
//! is needed. Named individuals are never merged.
//!
//! There is no at-most constructor, but a negated `atleast n R` (`n >= 2`)
//! can still show up when a defined name is negated. It is kept as an
//! at-most constraint: a branch closes if the same node also demands more
//! `R`-successors, or if it already has too many named ones. An otherwise
//! complete branch whose graph respects every at-most constraint is a model.
//! Anything else would need successor merging and is reported as
//! [`Error::UnsupportedNegation`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::concept::Concept;
use crate::error::{Error, Result};
use crate::kb::{KnowledgeBase, TBox};
use crate::par::{self, Exec};

type Tid = u32;
type Sym = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Term {
    Top,
    Bottom,
    Atom(Sym),
    NegAtom(Sym),
    And(Vec<Tid>),
    Or(Vec<Tid>),
    Exists(Sym, Tid),
    Forall(Sym, Tid),
    AtLeast(u32, Sym),
    AtMost(u32, Sym),
}

/// Hash-consed terms for one search.
#[derive(Default)]
struct Terms {
    terms: Vec<Term>,
    ids: HashMap<Term, Tid>,
    syms: HashMap<String, Sym>,
    sym_names: Vec<String>,
    complement: Vec<Option<Tid>>,
}

impl Terms {
    fn sym(&mut self, s: &str) -> Sym {
        if let Some(&id) = self.syms.get(s) {
            return id;
        }
        let id = self.sym_names.len() as Sym;
        self.sym_names.push(s.to_string());
        self.syms.insert(s.to_string(), id);
        id
    }

    fn term(&mut self, t: Term) -> Tid {
        if let Some(&id) = self.ids.get(&t) {
            return id;
        }
        let id = self.terms.len() as Tid;
        self.terms.push(t.clone());
        self.ids.insert(t, id);
        id
    }

    /// Interns a concept already in (lenient) negation normal form.
    fn intern(&mut self, c: &Concept) -> Tid {
        let t = match c {
            Concept::Top => Term::Top,
            Concept::Bottom => Term::Bottom,
            Concept::Atom(a) => Term::Atom(self.sym(a)),
            Concept::Not(inner) => match inner.as_ref() {
                Concept::Atom(a) => Term::NegAtom(self.sym(a)),
                Concept::AtLeast(n, r) => Term::AtMost(n - 1, self.sym(r)),
                other => unreachable!("not in negation normal form: not {other}"),
            },
            Concept::And(cs) => Term::And(cs.iter().map(|c| self.intern(c)).collect()),
            Concept::Or(cs) => Term::Or(cs.iter().map(|c| self.intern(c)).collect()),
            Concept::Exists(r, f) => {
                let r = self.sym(r);
                Term::Exists(r, self.intern(f))
            }
            Concept::Forall(r, f) => {
                let r = self.sym(r);
                Term::Forall(r, self.intern(f))
            }
            Concept::AtLeast(n, r) => Term::AtLeast(*n, self.sym(r)),
        };
        self.term(t)
    }

    fn seal(&mut self) {
        self.complement = self
            .terms
            .iter()
            .map(|t| match *t {
                Term::Atom(s) => self.ids.get(&Term::NegAtom(s)).copied(),
                Term::NegAtom(s) => self.ids.get(&Term::Atom(s)).copied(),
                _ => None,
            })
            .collect();
    }
}

/// Branch points a fact depends on, as sorted branch levels.
type Deps = Vec<u32>;

fn union(a: &Deps, b: &Deps) -> Deps {
    if a.is_empty() {
        return b.clone();
    }
    if b.is_empty() {
        return a.clone();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[derive(Debug, Clone)]
struct Node {
    label: BTreeMap<Tid, Deps>,
    edges: Vec<(Sym, usize, Deps)>,
    named: bool,
}

#[derive(Debug, Clone)]
struct Graph {
    nodes: Vec<Node>,
}

enum Outcome {
    Sat,
    /// Closed; the clash depends on these branch levels.
    Unsat(Deps),
    /// An open branch needs successor merging for `atmost n R`.
    Undecided(u32, Sym),
}

struct Clash(Deps);

struct Search<'t> {
    terms: &'t Terms,
    branches: u64,
}

impl Search<'_> {
    fn successors(g: &Graph, i: usize, r: Sym) -> impl Iterator<Item = (usize, &Deps)> + '_ {
        g.nodes[i].edges.iter().filter(move |(s, ..)| *s == r).map(|(_, j, d)| (*j, d))
    }

    fn successor_count(g: &Graph, i: usize, r: Sym) -> usize {
        let mut seen: Vec<usize> = Self::successors(g, i, r).map(|(j, _)| j).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// Adds `t` to the label of node `i`; `Ok(true)` if the label grew.
    fn add(&self, g: &mut Graph, i: usize, t: Tid, deps: Deps) -> Result<bool, Clash> {
        let label = &g.nodes[i].label;
        if label.contains_key(&t) {
            return Ok(false);
        }
        let conflict = match self.terms.terms[t as usize] {
            Term::Bottom => return Err(Clash(deps)),
            Term::Atom(_) | Term::NegAtom(_) => self.terms.complement[t as usize].and_then(|c| label.get(&c)),
            Term::AtLeast(n, r) => label
                .iter()
                .find(|(&o, _)| matches!(self.terms.terms[o as usize], Term::AtMost(m, s) if s == r && n > m))
                .map(|(_, d)| d),
            Term::AtMost(m, r) => label
                .iter()
                .find(|(&o, _)| matches!(self.terms.terms[o as usize], Term::AtLeast(n, s) if s == r && n > m))
                .map(|(_, d)| d),
            _ => None,
        };
        if let Some(other) = conflict {
            return Err(Clash(union(&deps, other)));
        }
        g.nodes[i].label.insert(t, deps);
        Ok(true)
    }

    fn fresh(&self, g: &mut Graph, from: usize, r: Sym, t: Tid, deps: Deps) -> Result<(), Clash> {
        g.nodes.push(Node { label: BTreeMap::new(), edges: Vec::new(), named: false });
        let j = g.nodes.len() - 1;
        g.nodes[from].edges.push((r, j, deps.clone()));
        self.add(g, j, t, deps)?;
        Ok(())
    }

    fn saturate(&self, g: &mut Graph) -> Result<(), Clash> {
        let top = self.terms.ids.get(&Term::Top).copied();
        loop {
            let mut changed = false;
            let mut i = 0;
            while i < g.nodes.len() {
                let label: Vec<(Tid, Deps)> = g.nodes[i].label.iter().map(|(&t, d)| (t, d.clone())).collect();
                for (t, deps) in label {
                    match &self.terms.terms[t as usize] {
                        Term::And(cs) => {
                            for &c in cs {
                                changed |= self.add(g, i, c, deps.clone())?;
                            }
                        }
                        &Term::Forall(r, f) => {
                            let succ: Vec<(usize, Deps)> =
                                Self::successors(g, i, r).map(|(j, d)| (j, union(&deps, d))).collect();
                            for (j, d) in succ {
                                changed |= self.add(g, j, f, d)?;
                            }
                        }
                        &Term::Exists(r, f) => {
                            if !Self::successors(g, i, r).any(|(j, _)| g.nodes[j].label.contains_key(&f)) {
                                self.fresh(g, i, r, f, deps)?;
                                changed = true;
                            }
                        }
                        &Term::AtLeast(n, r) => {
                            let have = Self::successor_count(g, i, r);
                            if have < n as usize {
                                let top = top.expect("Top is interned before search");
                                for _ in have..n as usize {
                                    self.fresh(g, i, r, top, deps.clone())?;
                                }
                                changed = true;
                            }
                        }
                        _ => {}
                    }
                }
                i += 1;
            }
            if !changed {
                return Ok(());
            }
        }
    }

    /// First unresolved disjunction, by node then term order.
    fn pending_or(&self, g: &Graph) -> Option<(usize, Vec<Tid>, Deps)> {
        for (i, node) in g.nodes.iter().enumerate() {
            for (&t, deps) in &node.label {
                if let Term::Or(ds) = &self.terms.terms[t as usize] {
                    if !ds.iter().any(|d| node.label.contains_key(d)) {
                        return Some((i, ds.clone(), deps.clone()));
                    }
                }
            }
        }
        None
    }

    /// Checks at-most constraints on a complete, clash-free graph.
    fn check_at_most(&self, g: &Graph) -> Outcome {
        let mut undecided = None;
        for (i, node) in g.nodes.iter().enumerate() {
            for (&t, deps) in &node.label {
                if let Term::AtMost(m, r) = self.terms.terms[t as usize] {
                    let mut succ: Vec<(usize, &Deps)> = Self::successors(g, i, r).collect();
                    succ.sort_unstable_by_key(|&(j, _)| j);
                    succ.dedup_by_key(|&mut (j, _)| j);
                    if succ.len() <= m as usize {
                        continue;
                    }
                    let named: Vec<&Deps> = succ.iter().filter(|&&(j, _)| g.nodes[j].named).map(|&(_, d)| d).collect();
                    if named.len() > m as usize {
                        let deps = named.into_iter().fold(deps.clone(), |acc, d| union(&acc, d));
                        return Outcome::Unsat(deps);
                    }
                    undecided.get_or_insert((m + 1, r));
                }
            }
        }
        match undecided {
            Some((n, r)) => Outcome::Undecided(n, r),
            None => Outcome::Sat,
        }
    }

    /// Explores disjunctions depth first. A closed branch whose clash does
    /// not depend on the current choice closes the whole choice point.
    fn solve(&mut self, mut g: Graph, level: u32) -> Outcome {
        if let Err(Clash(deps)) = self.saturate(&mut g) {
            return Outcome::Unsat(deps);
        }
        let Some((i, disjuncts, or_deps)) = self.pending_or(&g) else {
            return self.check_at_most(&g);
        };
        let mut undecided = None;
        let mut closed: Deps = Vec::new();
        for d in disjuncts {
            self.branches += 1;
            let mut branch = g.clone();
            let outcome = match self.add(&mut branch, i, d, union(&or_deps, &vec![level])) {
                Err(Clash(deps)) => Outcome::Unsat(deps),
                Ok(_) => self.solve(branch, level + 1),
            };
            match outcome {
                Outcome::Sat => return Outcome::Sat,
                Outcome::Unsat(deps) => {
                    if !deps.contains(&level) && undecided.is_none() {
                        return Outcome::Unsat(deps);
                    }
                    closed = union(&closed, &deps.into_iter().filter(|&l| l != level).collect());
                }
                u @ Outcome::Undecided(..) => {
                    undecided.get_or_insert(u);
                }
            }
        }
        undecided.unwrap_or(Outcome::Unsat(union(&closed, &or_deps)))
    }
}

/// Per-session counters. Monotone; safe to share across threads.
#[derive(Debug, Default)]
pub struct ReasonerStats {
    instance_checks: AtomicU64,
    satisfiability_calls: AtomicU64,
    branches_explored: AtomicU64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsSnapshot {
    pub instance_checks: u64,
    pub satisfiability_calls: u64,
    pub branches_explored: u64,
}

impl ReasonerStats {
    pub fn snapshot(&self) -> StatsSnapshot {
        StatsSnapshot {
            instance_checks: self.instance_checks.load(Ordering::Relaxed),
            satisfiability_calls: self.satisfiability_calls.load(Ordering::Relaxed),
            branches_explored: self.branches_explored.load(Ordering::Relaxed),
        }
    }
}

/// A reasoning session over one terminology and (optionally) one ABox.
#[derive(Debug)]
pub struct Reasoner<'kb> {
    tbox: &'kb TBox,
    individuals: Vec<&'kb str>,
    index: HashMap<&'kb str, usize>,
    /// Unfolded NNF labels of each individual, from its concept assertions.
    labels: Vec<Vec<Concept>>,
    edges: Vec<(&'kb str, usize, usize)>,
    stats: ReasonerStats,
    exec: Exec,
}

impl<'kb> Reasoner<'kb> {
    /// A session over a terminology with an empty ABox.
    pub fn for_tbox(tbox: &'kb TBox) -> Self {
        Reasoner {
            tbox,
            individuals: Vec::new(),
            index: HashMap::new(),
            labels: Vec::new(),
            edges: Vec::new(),
            stats: ReasonerStats::default(),
            exec: Exec::default(),
        }
    }

    pub fn new(kb: &'kb KnowledgeBase) -> Result<Self> {
        let mut r = Self::for_tbox(&kb.tbox);
        r.individuals = kb.individuals().iter().map(String::as_str).collect();
        r.index = r.individuals.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        r.labels = vec![Vec::new(); r.individuals.len()];
        for ca in kb.abox.concept_assertions() {
            let c = kb.tbox.unfold(&Concept::atom(ca.concept.as_str()))?.nnf_lenient();
            r.labels[r.index[ca.individual.as_str()]].push(c);
        }
        r.edges = kb
            .abox
            .role_assertions()
            .map(|ra| (ra.role.as_str(), r.index[ra.subject.as_str()], r.index[ra.object.as_str()]))
            .collect();
        Ok(r)
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn stats(&self) -> StatsSnapshot {
        self.stats.snapshot()
    }

    fn prepare(&self, c: &Concept) -> Result<Concept> {
        Ok(self.tbox.unfold(c)?.nnf_lenient())
    }

    /// Runs the search from the ABox graph (if `with_abox`) plus `extra`
    /// concepts placed on `at` (an individual index, or a fresh root).
    fn run(&self, with_abox: bool, at: Option<usize>, extra: &[Concept]) -> Result<bool> {
        self.stats.satisfiability_calls.fetch_add(1, Ordering::Relaxed);
        let mut terms = Terms::default();
        terms.term(Term::Top);
        let mut nodes: Vec<Node> = Vec::new();
        if with_abox {
            for label in &self.labels {
                let ids = label.iter().map(|c| terms.intern(c)).collect::<Vec<_>>();
                nodes.push(Node { label: BTreeMap::new(), edges: Vec::new(), named: true });
                nodes.last_mut().unwrap().label.extend(ids.into_iter().map(|t| (t, Vec::new())));
            }
            for &(r, s, o) in &self.edges {
                let r = terms.sym(r);
                if !nodes[s].edges.iter().any(|&(x, y, _)| (x, y) == (r, o)) {
                    nodes[s].edges.push((r, o, Vec::new()));
                }
            }
        }
        let root = match at {
            Some(i) => i,
            None => {
                nodes.push(Node { label: BTreeMap::new(), edges: Vec::new(), named: false });
                nodes.len() - 1
            }
        };
        let extra: Vec<Tid> = extra.iter().map(|c| terms.intern(c)).collect();
        terms.seal();

        let mut search = Search { terms: &terms, branches: 0 };
        // Initial labels may already clash; route them through `add`.
        let mut g = Graph { nodes: nodes.iter().map(|n| Node { label: BTreeMap::new(), ..n.clone() }).collect() };
        let mut clash = false;
        'init: for (i, n) in nodes.iter().enumerate() {
            for &t in n.label.keys() {
                if search.add(&mut g, i, t, Vec::new()).is_err() {
                    clash = true;
                    break 'init;
                }
            }
        }
        if !clash {
            for &t in &extra {
                if search.add(&mut g, root, t, Vec::new()).is_err() {
                    clash = true;
                    break;
                }
            }
        }
        let outcome = if clash { Outcome::Unsat(Vec::new()) } else { search.solve(g, 0) };
        self.stats.branches_explored.fetch_add(search.branches, Ordering::Relaxed);
        match outcome {
            Outcome::Sat => Ok(true),
            Outcome::Unsat(_) => Ok(false),
            Outcome::Undecided(n, r) => {
                Err(Error::UnsupportedNegation { n, role: terms.sym_names[r as usize].clone() })
            }
        }
    }

    /// Whether `c` has a non-empty extension in some model of the terminology.
    pub fn is_satisfiable(&self, c: &Concept) -> Result<bool> {
        let c = self.prepare(c)?;
        self.run(false, None, &[c])
    }

    /// Whether `c` is subsumed by `d` (`c ⊑ d`) w.r.t. the terminology.
    pub fn subsumes(&self, d: &Concept, c: &Concept) -> Result<bool> {
        let c = self.prepare(c)?;
        let not_d = self.prepare(&Concept::not(d.clone()))?;
        Ok(!self.run(false, None, &[c, not_d])?)
    }

    pub fn equivalent(&self, c: &Concept, d: &Concept) -> Result<bool> {
        Ok(self.subsumes(d, c)? && self.subsumes(c, d)?)
    }

    /// Whether the ABox together with the terminology has a model.
    pub fn abox_consistent(&self) -> Result<bool> {
        self.run(true, None, &[])
    }

    /// Whether the knowledge base entails `c(a)`.
    pub fn instance_check(&self, a: &str, c: &Concept) -> Result<bool> {
        let &i = self.index.get(a).ok_or_else(|| Error::UnknownIndividual(a.to_string()))?;
        self.stats.instance_checks.fetch_add(1, Ordering::Relaxed);
        let not_c = self.prepare(&Concept::not(c.clone()))?;
        Ok(!self.run(true, Some(i), &[not_c])?)
    }

    /// All individuals `a` with `K ⊨ c(a)`.
    pub fn retrieve(&self, c: &Concept) -> Result<BTreeSet<String>> {
        let hits = par::try_map(self.exec, &self.individuals, |a| Ok::<_, Error>(self.instance_check(a, c)?.then_some(*a)))?;
        Ok(hits.into_iter().flatten().map(str::to_string).collect())
    }
}

pub fn is_satisfiable(c: &Concept, t: &TBox) -> Result<bool> {
    Reasoner::for_tbox(t).is_satisfiable(c)
}

/// `c ⊑ d` w.r.t. `t`.
pub fn subsumes(d: &Concept, c: &Concept, t: &TBox) -> Result<bool> {
    Reasoner::for_tbox(t).subsumes(d, c)
}

pub fn equivalent(c: &Concept, d: &Concept, t: &TBox) -> Result<bool> {
    Reasoner::for_tbox(t).equivalent(c, d)
}

pub fn abox_consistent(k: &KnowledgeBase) -> Result<bool> {
    Reasoner::new(k)?.abox_consistent()
}

pub fn instance_check(k: &KnowledgeBase, a: &str, c: &Concept) -> Result<bool> {
    Reasoner::new(k)?.instance_check(a, c)
}

pub fn retrieve_entail(k: &KnowledgeBase, c: &Concept) -> Result<BTreeSet<String>> {
    Reasoner::new(k)?.retrieve(c)
}
