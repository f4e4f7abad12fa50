//! Extension-based semantic similarity between concepts and individuals.
//!
//! For concepts `C`, `D` with `I = C and D`:
//!
//! ```text
//! s(C, D) = |I| / (|C| + |D| - |I|) * max(|I| / |C|, |I| / |D|)
//! ```
//!
//! and `s = 0` when `|I| = 0`. Individuals are compared through their MSC
//! approximations. All arithmetic is exact on the cardinalities; the reported
//! `value` is the nearest `f64` to the exact rational.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::concept::Concept;
use crate::engine::{Backend, Cost, Engine};
use crate::error::{Error, Result};
use crate::kb::KnowledgeBase;
use crate::par;

/// Exact similarity from the three extension sizes.
pub fn sim_formula_exact(n_c: usize, n_d: usize, n_i: usize) -> Result<Ratio<u64>> {
    if n_i > n_c || n_i > n_d {
        return Err(Error::CardinalityViolation { n_c, n_d, n_i });
    }
    if n_i == 0 {
        return Ok(Ratio::from_integer(0));
    }
    let (c, d, i) = (n_c as u64, n_d as u64, n_i as u64);
    // max(i/c, i/d) = i / min(c, d)
    let overlap = Ratio::new(i, c + d - i);
    let incidence = Ratio::new(i, c.min(d));
    Ok(overlap * incidence)
}

pub fn sim_formula(n_c: usize, n_d: usize, n_i: usize) -> Result<f64> {
    sim_formula_exact(n_c, n_d, n_i).map(to_f64)
}

fn to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub value: f64,
    pub ext_c: usize,
    pub ext_d: usize,
    pub ext_i: usize,
    pub backend: Backend,
    pub extension_computations: u64,
    pub msc_computations: u64,
    pub msc_depth: Option<usize>,
}

impl SimilarityReport {
    /// The exact value, recomputed from the cardinalities.
    pub fn exact(&self) -> Ratio<u64> {
        sim_formula_exact(self.ext_c, self.ext_d, self.ext_i).expect("report cardinalities are consistent")
    }
}

/// Something that can be compared: a concept expression or a named individual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Concept(Concept),
    Individual(String),
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Concept(c) => write!(f, "{c}"),
            Item::Individual(a) => f.write_str(a),
        }
    }
}

/// Square similarity matrix over labelled items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl SimMatrix {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }
}

impl Engine<'_> {
    fn compare(&self, c: &Concept, d: &Concept, backend: Backend, cost: &mut Cost) -> Result<SimilarityReport> {
        let ext_c = self.extension_counted(c, backend, cost)?;
        let ext_d = self.extension_counted(d, backend, cost)?;
        let both = Concept::and(vec![c.clone(), d.clone()]);
        let ext_i = self.extension_counted(&both, backend, cost)?;
        let (n_c, n_d, n_i) = (ext_c.len(), ext_d.len(), ext_i.len());
        Ok(SimilarityReport {
            value: sim_formula(n_c, n_d, n_i)?,
            ext_c: n_c,
            ext_d: n_d,
            ext_i: n_i,
            backend,
            extension_computations: cost.extension_computations,
            msc_computations: cost.msc_computations,
            msc_depth: None,
        })
    }

    /// Similarity of two concept descriptions. Performs three extension
    /// computations: `c`, `d` and `c and d`.
    pub fn sim_concepts(&self, c: &Concept, d: &Concept, backend: Backend) -> Result<SimilarityReport> {
        self.compare(c, d, backend, &mut Cost::default())
    }

    /// Similarity of individual `a` (through its MSC approximation) and concept `c`.
    pub fn sim_individual_concept(
        &self,
        a: &str,
        c: &Concept,
        depth: Option<usize>,
        backend: Backend,
    ) -> Result<SimilarityReport> {
        let mut cost = Cost::default();
        let msc = self.msc_counted(a, depth, backend, &mut cost)?;
        let mut report = self.compare(&msc.concept, c, backend, &mut cost)?;
        report.msc_depth = Some(msc.depth);
        Ok(report)
    }

    /// Similarity of two individuals through their MSC approximations.
    pub fn sim_individuals(&self, a: &str, b: &str, depth: Option<usize>, backend: Backend) -> Result<SimilarityReport> {
        let mut cost = Cost::default();
        let ma = self.msc_counted(a, depth, backend, &mut cost)?;
        let mb = self.msc_counted(b, depth, backend, &mut cost)?;
        let mut report = self.compare(&ma.concept, &mb.concept, backend, &mut cost)?;
        report.msc_depth = Some(ma.depth);
        Ok(report)
    }

    /// Dispatches on the kinds of `x` and `y`. A concept-individual pair is
    /// measured as `s(MSC*(individual), concept)`, so the report's `ext_c`
    /// then refers to the individual.
    pub fn sim_items(&self, x: &Item, y: &Item, depth: Option<usize>, backend: Backend) -> Result<SimilarityReport> {
        match (x, y) {
            (Item::Concept(c), Item::Concept(d)) => self.sim_concepts(c, d, backend),
            (Item::Individual(a), Item::Concept(c)) | (Item::Concept(c), Item::Individual(a)) => {
                self.sim_individual_concept(a, c, depth, backend)
            }
            (Item::Individual(a), Item::Individual(b)) => self.sim_individuals(a, b, depth, backend),
        }
    }

    /// Pairwise similarities. Each individual's MSC approximation is computed
    /// once, then the upper triangle is evaluated (in parallel when enabled)
    /// and mirrored.
    pub fn sim_matrix(&self, items: &[Item], depth: Option<usize>, backend: Backend) -> Result<SimMatrix> {
        if items.is_empty() {
            return Err(Error::InvalidArgument("similarity matrix needs at least one item".into()));
        }
        let concepts = par::try_map(self.exec(), items, |item| -> Result<Concept> {
            Ok(match item {
                Item::Concept(c) => c.clone(),
                Item::Individual(a) => self.msc(a, depth, backend)?.concept,
            })
        })?;
        let n = items.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let sims = par::try_map(self.exec(), &pairs, |&(i, j)| {
            Ok::<_, Error>(self.sim_concepts(&concepts[i], &concepts[j], backend)?.value)
        })?;
        let mut values = vec![vec![0.0; n]; n];
        for (&(i, j), v) in pairs.iter().zip(sims) {
            values[i][j] = v;
            values[j][i] = v;
        }
        Ok(SimMatrix { labels: items.iter().map(Item::to_string).collect(), values })
    }
}

pub fn sim_concepts(k: &KnowledgeBase, c: &Concept, d: &Concept, backend: Backend) -> Result<SimilarityReport> {
    Engine::new(k)?.sim_concepts(c, d, backend)
}

pub fn sim_individual_concept(
    k: &KnowledgeBase,
    a: &str,
    c: &Concept,
    depth: Option<usize>,
    backend: Backend,
) -> Result<SimilarityReport> {
    Engine::new(k)?.sim_individual_concept(a, c, depth, backend)
}

pub fn sim_individuals(k: &KnowledgeBase, a: &str, b: &str, depth: Option<usize>, backend: Backend) -> Result<SimilarityReport> {
    Engine::new(k)?.sim_individuals(a, b, depth, backend)
}

pub fn sim_matrix(k: &KnowledgeBase, items: &[Item], depth: Option<usize>, backend: Backend) -> Result<SimMatrix> {
    Engine::new(k)?.sim_matrix(items, depth, backend)
}

/// Similarity of two explicit extensions; exposed for oracles and tools
/// that already hold the member sets.
pub fn sim_of_sets(c: &BTreeSet<String>, d: &BTreeSet<String>) -> Ratio<u64> {
    let i = c.intersection(d).count();
    sim_formula_exact(c.len(), d.len(), i).expect("intersection is bounded by both sets")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_concept, parse_kb};

    #[test]
    fn formula_values() {
        assert_eq!(sim_formula_exact(2, 3, 2).unwrap(), Ratio::new(2, 3));
        assert_eq!(sim_formula(2, 1, 1).unwrap(), 0.5);
        for n in 1..20 {
            assert_eq!(sim_formula(n, n, n).unwrap(), 1.0);
        }
        assert_eq!(sim_formula(5, 7, 0).unwrap(), 0.0);
        assert_eq!(sim_formula(0, 0, 0).unwrap(), 0.0);
        assert_eq!(sim_formula(0, 3, 0).unwrap(), 0.0);
        assert_eq!(sim_formula(1, 3, 2), Err(Error::CardinalityViolation { n_c: 1, n_d: 3, n_i: 2 }));
    }

    #[test]
    fn concept_similarity_and_costs() {
        let kb = parse_kb("A(a)\nA(b)\nB(b)\nB(c)\nR(a, b)\n").unwrap();
        let e = Engine::new(&kb).unwrap();
        let a = parse_concept("A").unwrap();
        let b = parse_concept("B").unwrap();
        let r = e.sim_concepts(&a, &b, Backend::Canonical).unwrap();
        assert_eq!((r.ext_c, r.ext_d, r.ext_i), (2, 2, 1));
        assert_eq!(r.exact(), Ratio::new(1, 6));
        assert_eq!((r.extension_computations, r.msc_computations), (3, 0));
        let r = e.sim_concepts(&a, &a, Backend::Canonical).unwrap();
        assert_eq!(r.value, 1.0);
        let r = e.sim_concepts(&a, &Concept::not(a.clone()), Backend::Canonical).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn individual_forms() {
        let kb = parse_kb("A(a)\nA(b)\nB(c)\nR(a, c)\n").unwrap();
        let e = Engine::new(&kb).unwrap();
        let r = e.sim_individuals("a", "a", None, Backend::Canonical).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!((r.extension_computations, r.msc_computations, r.msc_depth), (3, 2, Some(1)));
        let r = e.sim_individual_concept("b", &Concept::atom("A"), Some(0), Backend::Canonical).unwrap();
        assert_eq!((r.ext_c, r.ext_d, r.ext_i), (2, 2, 2));
        assert_eq!(r.msc_computations, 1);
        let r = e.sim_individual_concept("c", &Concept::Bottom, Some(0), Backend::Canonical).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn top_msc_against_top() {
        let kb = parse_kb("R(a, b)\n").unwrap();
        let r = sim_individual_concept(&kb, "b", &Concept::Top, None, Backend::Canonical).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn matrix_is_symmetric() {
        let kb = parse_kb("A(a)\nA(b)\nB(b)\nR(a, b)\n").unwrap();
        let items = vec![
            Item::Concept(parse_concept("A").unwrap()),
            Item::Concept(parse_concept("B").unwrap()),
            Item::Individual("a".into()),
        ];
        let m = sim_matrix(&kb, &items, None, Backend::Canonical).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
        assert_eq!(m.labels, vec!["A", "B", "a"]);
        assert!(sim_matrix(&kb, &[], None, Backend::Canonical).is_err());
    }

    #[test]
    fn report_exact_from_cardinalities() {
        let r = SimilarityReport {
            value: 2.0 / 3.0,
            ext_c: 2,
            ext_d: 3,
            ext_i: 2,
            backend: Backend::Canonical,
            extension_computations: 3,
            msc_computations: 0,
            msc_depth: None,
        };
        assert_eq!(r.exact(), Ratio::new(2, 3));
    }
}
