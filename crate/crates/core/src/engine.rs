//! Extension computation over either reasoning backend, with the cost
//! counters used by the similarity operations.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::canonical::CanonicalModel;
use crate::concept::Concept;
use crate::error::{Error, Result};
use crate::kb::KnowledgeBase;
use crate::par::{self, Exec};
use crate::tableau::{Reasoner, StatsSnapshot};

/// Which notion of concept extension to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Individuals `a` with `K ⊨ C(a)`, by tableau instance checks.
    Entail,
    /// Members in the closed-world canonical interpretation.
    #[default]
    Canonical,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Entail => "entail",
            Backend::Canonical => "canonical",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "entail" => Ok(Backend::Entail),
            "canonical" => Ok(Backend::Canonical),
            other => Err(Error::InvalidArgument(format!("unknown backend `{other}`"))),
        }
    }
}

/// Work performed by one top-level operation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Cost {
    pub extension_computations: u64,
    pub msc_computations: u64,
}

impl std::ops::AddAssign for Cost {
    fn add_assign(&mut self, rhs: Self) {
        self.extension_computations += rhs.extension_computations;
        self.msc_computations += rhs.msc_computations;
    }
}

pub type Extension = Arc<BTreeSet<String>>;

type NamedMembers = BTreeMap<String, BTreeSet<String>>;

/// Shared, read-only view of a knowledge base with both backends attached.
///
/// Every method takes `&self`; an engine can be used from several threads.
pub struct Engine<'kb> {
    kb: &'kb KnowledgeBase,
    model: CanonicalModel,
    reasoner: Reasoner<'kb>,
    exec: Exec,
    cache: Option<Mutex<HashMap<(Backend, Concept), Extension>>>,
    named: [OnceLock<NamedMembers>; 2],
    extension_computations: AtomicU64,
    msc_computations: AtomicU64,
}

impl<'kb> Engine<'kb> {
    pub fn new(kb: &'kb KnowledgeBase) -> Result<Self> {
        Ok(Engine {
            kb,
            model: CanonicalModel::build(kb)?,
            reasoner: Reasoner::new(kb)?,
            exec: Exec::default(),
            cache: None,
            named: [OnceLock::new(), OnceLock::new()],
            extension_computations: AtomicU64::new(0),
            msc_computations: AtomicU64::new(0),
        })
    }

    /// Memoizes extensions by `(backend, concept)`. Cache hits are not
    /// counted as extension computations.
    pub fn with_cache(mut self, on: bool) -> Self {
        self.cache = on.then(|| Mutex::new(HashMap::new()));
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self.reasoner = self.reasoner.with_exec(exec);
        self
    }

    pub fn kb(&self) -> &'kb KnowledgeBase {
        self.kb
    }

    pub fn model(&self) -> &CanonicalModel {
        &self.model
    }

    pub fn reasoner(&self) -> &Reasoner<'kb> {
        &self.reasoner
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    pub fn reasoner_stats(&self) -> StatsSnapshot {
        self.reasoner.stats()
    }

    /// Totals since construction.
    pub fn total_cost(&self) -> Cost {
        Cost {
            extension_computations: self.extension_computations.load(Ordering::Relaxed),
            msc_computations: self.msc_computations.load(Ordering::Relaxed),
        }
    }

    pub(crate) fn count_msc(&self, cost: &mut Cost) {
        cost.msc_computations += 1;
        self.msc_computations.fetch_add(1, Ordering::Relaxed);
    }

    /// Extension of `c` under `backend`.
    pub fn extension(&self, c: &Concept, backend: Backend) -> Result<Extension> {
        self.extension_counted(c, backend, &mut Cost::default())
    }

    pub(crate) fn extension_counted(&self, c: &Concept, backend: Backend, cost: &mut Cost) -> Result<Extension> {
        if let Some(cache) = &self.cache {
            if let Some(hit) = cache.lock().unwrap().get(&(backend, c.clone())) {
                return Ok(hit.clone());
            }
        }
        let ext = Arc::new(match backend {
            Backend::Canonical => self.model.eval(&self.kb.tbox, c),
            Backend::Entail => self.reasoner.retrieve(c)?,
        });
        cost.extension_computations += 1;
        self.extension_computations.fetch_add(1, Ordering::Relaxed);
        if let Some(cache) = &self.cache {
            cache.lock().unwrap().insert((backend, c.clone()), ext.clone());
        }
        Ok(ext)
    }

    /// Extension of every concept name in the signature. Computed once per backend.
    pub(crate) fn named_members(&self, backend: Backend) -> Result<&NamedMembers> {
        let slot = &self.named[backend as usize];
        if let Some(m) = slot.get() {
            return Ok(m);
        }
        let names: Vec<&String> = self.kb.signature().concepts.iter().collect();
        let exts = par::try_map(self.exec, &names, |n| -> Result<BTreeSet<String>> {
            let c = Concept::atom(n.as_str());
            match backend {
                Backend::Canonical => Ok(self.model.eval(&self.kb.tbox, &c)),
                Backend::Entail => self.reasoner.retrieve(&c),
            }
        })?;
        let map = names.into_iter().cloned().zip(exts).collect();
        Ok(slot.get_or_init(|| map))
    }

    /// Concept names whose extension under `backend` contains `a`, sorted.
    pub fn concept_names_of(&self, a: &str, backend: Backend) -> Result<Vec<String>> {
        self.kb.require_individual(a)?;
        let named = self.named_members(backend)?;
        Ok(named.iter().filter(|(_, ext)| ext.contains(a)).map(|(n, _)| n.clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_concept, parse_kb};

    #[test]
    fn cache_suppresses_recount() {
        let kb = parse_kb("A(a)\nB(b)\n").unwrap();
        let c = parse_concept("A or B").unwrap();
        let e = Engine::new(&kb).unwrap().with_cache(true);
        let x = e.extension(&c, Backend::Canonical).unwrap();
        let y = e.extension(&c, Backend::Canonical).unwrap();
        assert_eq!(x, y);
        assert_eq!(e.total_cost().extension_computations, 1);
        e.extension(&c, Backend::Entail).unwrap();
        assert_eq!(e.total_cost().extension_computations, 2);

        let e = Engine::new(&kb).unwrap();
        e.extension(&c, Backend::Canonical).unwrap();
        e.extension(&c, Backend::Canonical).unwrap();
        assert_eq!(e.total_cost().extension_computations, 2);
    }

    #[test]
    fn backend_parsing() {
        assert_eq!("entail".parse::<Backend>().unwrap(), Backend::Entail);
        assert_eq!("CANONICAL".parse::<Backend>().unwrap(), Backend::Canonical);
        assert!("closed".parse::<Backend>().is_err());
        assert_eq!(Backend::default(), Backend::Canonical);
    }

    #[test]
    fn names_of_individual() {
        let kb = parse_kb("W := H and F\nW(c)\nR(c, d)\n").unwrap();
        let e = Engine::new(&kb).unwrap();
        assert_eq!(e.concept_names_of("c", Backend::Canonical).unwrap(), vec!["F", "H", "W"]);
        assert_eq!(e.concept_names_of("c", Backend::Entail).unwrap(), vec!["F", "H", "W"]);
        assert!(e.concept_names_of("d", Backend::Canonical).unwrap().is_empty());
        assert!(matches!(e.concept_names_of("z", Backend::Canonical), Err(Error::UnknownIndividual(_))));
    }
}
