//! Depth-bounded approximation of the most specific concept of an individual.
//!
//! The approximation conjoins every concept name the individual belongs to
//! and, while depth remains, rolls up each asserted role edge `R(x, y)` into
//! `exists R.(approximation of y)`. Each path keeps the individuals it has
//! visited; an edge back onto the path contributes `exists R.Top`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::concept::Concept;
use crate::engine::{Backend, Cost, Engine};
use crate::error::Result;
use crate::kb::KnowledgeBase;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MscResult {
    pub individual: String,
    pub depth: usize,
    #[serde(serialize_with = "as_text")]
    pub concept: Concept,
    pub backend: Backend,
}

fn as_text<S: serde::Serializer>(c: &Concept, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(c)
}

/// Length of the longest simple directed path in the role-assertion graph,
/// with role labels ignored. Exhaustive search.
pub fn abox_depth(k: &KnowledgeBase) -> usize {
    let inds: Vec<&str> = k.individuals().iter().map(String::as_str).collect();
    let index: BTreeMap<&str, usize> = inds.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); inds.len()];
    for ra in k.abox.role_assertions() {
        adj[index[ra.subject.as_str()]].insert(index[ra.object.as_str()]);
    }
    fn longest(adj: &[BTreeSet<usize>], x: usize, on_path: &mut [bool]) -> usize {
        on_path[x] = true;
        let mut best = 0;
        for &y in &adj[x] {
            if !on_path[y] {
                best = best.max(1 + longest(adj, y, on_path));
            }
        }
        on_path[x] = false;
        best
    }
    let mut on_path = vec![false; inds.len()];
    (0..inds.len()).map(|x| longest(&adj, x, &mut on_path)).max().unwrap_or(0)
}

struct RollUp<'e> {
    names: BTreeMap<&'e str, Vec<String>>,
    edges: BTreeMap<&'e str, Vec<(&'e str, &'e str)>>,
}

impl RollUp<'_> {
    fn build(&self, x: &str, depth: usize, visited: &mut Vec<String>) -> Concept {
        let mut parts: Vec<Concept> =
            self.names.get(x).into_iter().flatten().map(|n| Concept::atom(n.as_str())).collect();
        if depth > 0 {
            for &(role, y) in self.edges.get(x).into_iter().flatten() {
                if visited.iter().any(|v| v == y) {
                    parts.push(Concept::exists(role, Concept::Top));
                } else {
                    visited.push(y.to_string());
                    parts.push(Concept::exists(role, self.build(y, depth - 1, visited)));
                    visited.pop();
                }
            }
        }
        Concept::and(parts)
    }
}

impl Engine<'_> {
    /// Approximation of the most specific concept of `a` up to `depth`
    /// nested role restrictions (`None`: the ABox depth).
    pub fn msc(&self, a: &str, depth: Option<usize>, backend: Backend) -> Result<MscResult> {
        self.msc_counted(a, depth, backend, &mut Cost::default())
    }

    pub(crate) fn msc_counted(&self, a: &str, depth: Option<usize>, backend: Backend, cost: &mut Cost) -> Result<MscResult> {
        let kb = self.kb();
        kb.require_individual(a)?;
        let depth = depth.unwrap_or_else(|| abox_depth(kb));
        let mut names: BTreeMap<&str, Vec<String>> = BTreeMap::new();
        for x in kb.individuals() {
            names.insert(x.as_str(), self.concept_names_of(x, backend)?);
        }
        let mut edges: BTreeMap<&str, Vec<(&str, &str)>> = BTreeMap::new();
        for ra in kb.abox.role_assertions() {
            edges.entry(ra.subject.as_str()).or_default().push((ra.role.as_str(), ra.object.as_str()));
        }
        for es in edges.values_mut() {
            es.sort_unstable();
        }
        let concept = RollUp { names, edges }.build(a, depth, &mut vec![a.to_string()]).normalize();
        self.count_msc(cost);
        Ok(MscResult { individual: a.to_string(), depth, concept, backend })
    }
}

/// One-shot form of [`Engine::msc`].
pub fn msc_approx(k: &KnowledgeBase, a: &str, depth: Option<usize>, backend: Backend) -> Result<MscResult> {
    Engine::new(k)?.msc(a, depth, backend)
}
