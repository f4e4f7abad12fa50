//! Seeded random knowledge bases and concepts, for property tests,
//! benchmarks and the `gen` command.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::concept::Concept;
use crate::kb::{ABox, DefinitionKind, KnowledgeBase, TBox};

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub individuals: usize,
    /// Concept names `C0..`; the last `defined` of them get definitions.
    pub concept_names: usize,
    pub defined: usize,
    pub role_names: usize,
    pub concept_assertions: usize,
    pub role_assertions: usize,
    /// Nesting bound for definition bodies and query concepts.
    pub max_depth: usize,
    /// Largest `n` for generated `atleast n R`; 0 disables the constructor.
    pub max_at_least: u32,
    /// Probability that an individual is asserted into a defined name
    /// rather than a primitive one.
    pub defined_assertion_rate: f64,
    /// Allow `or`, `not` and `forall` in generated concepts.
    pub full_alc: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            individuals: 6,
            concept_names: 6,
            defined: 2,
            role_names: 2,
            concept_assertions: 8,
            role_assertions: 7,
            max_depth: 2,
            max_at_least: 2,
            defined_assertion_rate: 0.25,
            full_alc: true,
        }
    }
}

/// Deterministic generator; equal seeds and configs give equal output.
pub struct Generator {
    rng: ChaCha8Rng,
    cfg: GenConfig,
    concepts: Vec<String>,
    roles: Vec<String>,
}

impl Generator {
    pub fn new(seed: u64, cfg: GenConfig) -> Self {
        let concepts = (0..cfg.concept_names.max(1)).map(|i| format!("C{i}")).collect();
        let roles = (0..cfg.role_names.max(1)).map(|i| format!("r{i}")).collect();
        Generator { rng: ChaCha8Rng::seed_from_u64(seed), cfg, concepts, roles }
    }

    pub fn config(&self) -> &GenConfig {
        &self.cfg
    }

    pub fn concept_names(&self) -> &[String] {
        &self.concepts
    }

    pub fn role_names(&self) -> &[String] {
        &self.roles
    }

    /// A random concept of nesting depth at most `depth` over `names`.
    pub fn concept_over(&mut self, names: &[String], depth: usize) -> Concept {
        let leaf = depth == 0 || self.rng.random_bool(0.3);
        if leaf {
            return match self.rng.random_range(0..10) {
                0 => Concept::Top,
                1 if self.cfg.full_alc => Concept::Bottom,
                2 if self.cfg.full_alc => Concept::not(self.atom(names)),
                3 if depth > 0 && self.cfg.max_at_least > 0 => {
                    let n = self.rng.random_range(1..=self.cfg.max_at_least);
                    Concept::AtLeast(n, self.role())
                }
                _ => self.atom(names),
            };
        }
        let choices: &[u8] = if self.cfg.full_alc { &[0, 0, 1, 2, 3, 3, 4] } else { &[0, 0, 3, 3] };
        match *choices.choose(&mut self.rng).unwrap() {
            0 => {
                let k = self.rng.random_range(2..=3);
                Concept::And((0..k).map(|_| self.concept_over(names, depth - 1)).collect())
            }
            1 => Concept::Or((0..2).map(|_| self.concept_over(names, depth - 1)).collect()),
            2 => Concept::not(self.concept_over(names, depth - 1)),
            3 => {
                let r = self.role();
                Concept::exists(r, self.concept_over(names, depth - 1))
            }
            _ => {
                let r = self.role();
                Concept::forall(r, self.concept_over(names, depth - 1))
            }
        }
    }

    /// A random concept over the generator's full concept-name set.
    pub fn concept(&mut self, depth: usize) -> Concept {
        let names = self.concepts.clone();
        self.concept_over(&names, depth)
    }

    fn atom(&mut self, names: &[String]) -> Concept {
        Concept::atom(names.choose(&mut self.rng).unwrap().as_str())
    }

    fn role(&mut self) -> String {
        self.roles.choose(&mut self.rng).unwrap().clone()
    }

    /// A random knowledge base. Definition bodies only mention lower-numbered
    /// names, so the terminology is acyclic.
    pub fn kb(&mut self) -> KnowledgeBase {
        let n_concepts = self.concepts.len();
        let n_defined = self.cfg.defined.min(n_concepts.saturating_sub(1));
        let first_defined = n_concepts - n_defined;
        let mut tbox = TBox::new();
        for i in first_defined..n_concepts {
            let lower = self.concepts[..i].to_vec();
            let body = self.concept_over(&lower, self.cfg.max_depth);
            let kind = if self.rng.random_bool(0.8) { DefinitionKind::Equiv } else { DefinitionKind::Subsumed };
            tbox.define(self.concepts[i].clone(), kind, body).expect("fresh names");
        }
        let inds: Vec<String> = (0..self.cfg.individuals.max(1)).map(|i| format!("i{i}")).collect();
        let mut abox = ABox::new();
        for _ in 0..self.cfg.concept_assertions {
            let name = if n_defined > 0 && self.rng.random_bool(self.cfg.defined_assertion_rate) {
                self.concepts[self.rng.random_range(first_defined..n_concepts)].clone()
            } else {
                self.concepts[self.rng.random_range(0..first_defined)].clone()
            };
            abox.assert_concept(name, inds.choose(&mut self.rng).unwrap().clone());
        }
        for _ in 0..self.cfg.role_assertions {
            let r = self.role();
            let s = inds.choose(&mut self.rng).unwrap().clone();
            let o = inds.choose(&mut self.rng).unwrap().clone();
            abox.assert_role(r, s, o);
        }
        KnowledgeBase::new(tbox, abox).expect("generated terminology is acyclic")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_kb, serialize_kb};

    #[test]
    fn reproducible() {
        let a = Generator::new(7, GenConfig::default()).kb();
        let b = Generator::new(7, GenConfig::default()).kb();
        assert_eq!(a, b);
        assert_eq!(serialize_kb(&a), serialize_kb(&b));
    }

    #[test]
    fn output_parses_back() {
        for seed in 0..50 {
            let kb = Generator::new(seed, GenConfig::default()).kb();
            assert_eq!(parse_kb(&serialize_kb(&kb)).unwrap(), kb);
        }
    }

    #[test]
    fn depth_bound() {
        let mut g = Generator::new(3, GenConfig::default());
        for d in 0..4 {
            for _ in 0..50 {
                assert!(g.concept(d).depth() <= d);
            }
        }
    }
}
