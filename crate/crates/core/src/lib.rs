//! Description logic toolkit for ALC knowledge bases.
//!
//! * [`parser`] reads and writes the `.dlkb` text format.
//! * [`tableau`] decides satisfiability, subsumption and instance checking
//!   under open-world semantics.
//! * [`canonical`] evaluates concepts in the closed-world canonical
//!   interpretation of the ABox.
//! * [`msc`] approximates the most specific concept of an individual.
//! * [`similarity`] measures concept and individual similarity from
//!   extension cardinalities; [`cluster`] builds dendrograms from it.
//!
//! ```
//! use dlsim::{parse_concept, parse_kb, Backend, Engine};
//!
//! let kb = parse_kb("Woman := Human and Female\nWoman(ann)\nHuman(bob)\n").unwrap();
//! let engine = Engine::new(&kb).unwrap();
//! let report = engine
//!     .sim_concepts(&parse_concept("Woman").unwrap(), &parse_concept("Human").unwrap(), Backend::Canonical)
//!     .unwrap();
//! assert_eq!((report.ext_c, report.ext_d, report.ext_i), (1, 2, 1));
//! assert_eq!(report.value, 0.5);
//! ```

pub mod canonical;
pub mod cluster;
pub mod concept;
pub mod engine;
pub mod error;
pub mod gen;
pub mod kb;
pub mod msc;
pub mod par;
pub mod parser;
pub mod similarity;
pub mod tableau;

pub use canonical::{build_canonical, eval_concept, retrieve_canonical, told_closure, CanonicalModel};
pub use cluster::{agglomerate, Dendrogram, Linkage, Merge};
pub use concept::Concept;
pub use engine::{Backend, Cost, Engine};
pub use error::{Error, ParseError, ParseErrorKind, Result};
pub use kb::{ABox, DefinitionKind, KnowledgeBase, TBox};
pub use msc::{abox_depth, msc_approx, MscResult};
pub use par::Exec;
pub use parser::{parse_concept, parse_kb, serialize_concept, serialize_kb};
pub use similarity::{
    sim_concepts, sim_formula, sim_formula_exact, sim_individual_concept, sim_individuals, sim_matrix, sim_of_sets, Item,
    SimMatrix, SimilarityReport,
};
pub use tableau::{Reasoner, ReasonerStats, StatsSnapshot};
