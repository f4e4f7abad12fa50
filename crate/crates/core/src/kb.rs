//! Knowledge base container: terminology (TBox) and assertions (ABox).

use std::collections::BTreeSet;

use indexmap::{IndexMap, IndexSet};

use crate::concept::Concept;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DefinitionKind {
    /// `N := D`, full definition.
    Equiv,
    /// `N <= D`, partial definition.
    Subsumed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub kind: DefinitionKind,
    pub body: Concept,
}

/// Acyclic set of named (partial) definitions. Each name is defined at most once.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TBox {
    defs: IndexMap<String, Definition>,
}

/// Suffix of the fresh primitive that stands for the unspecified part of a
/// partially defined name: `N <= D` is expanded as `N* and D`.
pub const MARKER_SUFFIX: char = '*';

pub fn marker_name(name: &str) -> String {
    format!("{name}{MARKER_SUFFIX}")
}

impl TBox {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a definition, rejecting a second definition of the same name.
    /// Acyclicity is checked separately by [`TBox::check_acyclic`].
    pub fn define(&mut self, name: impl Into<String>, kind: DefinitionKind, body: Concept) -> Result<()> {
        let name = name.into();
        if self.defs.contains_key(&name) {
            return Err(Error::InvalidArgument(format!("`{name}` is defined twice")));
        }
        self.defs.insert(name, Definition { kind, body });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Definition> {
        self.defs.get(name)
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Definition)> {
        self.defs.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Fails with the offending path if some name reaches itself through definition bodies.
    pub fn check_acyclic(&self) -> Result<()> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done,
        }
        fn dfs<'a>(
            t: &'a TBox,
            name: &'a str,
            marks: &mut IndexMap<&'a str, Mark>,
            path: &mut Vec<&'a str>,
        ) -> Result<()> {
            match marks.get(name) {
                Some(Mark::Done) => return Ok(()),
                Some(Mark::Open) => {
                    let start = path.iter().position(|n| *n == name).unwrap_or(0);
                    let mut cycle: Vec<String> = path[start..].iter().map(|s| s.to_string()).collect();
                    cycle.push(name.to_string());
                    return Err(Error::CyclicTBox { path: cycle });
                }
                None => {}
            }
            let Some(def) = t.get(name) else { return Ok(()) };
            marks.insert(name, Mark::Open);
            path.push(name);
            for dep in def.body.concept_names() {
                dfs(t, dep, marks, path)?;
            }
            path.pop();
            marks.insert(name, Mark::Done);
            Ok(())
        }

        let mut marks = IndexMap::new();
        for name in self.defs.keys() {
            dfs(self, name, &mut marks, &mut Vec::new())?;
        }
        Ok(())
    }

    /// Expands defined names until only primitive names and partial-definition
    /// markers remain.
    pub fn unfold(&self, c: &Concept) -> Result<Concept> {
        self.unfold_on_path(c, &mut Vec::new())
    }

    fn unfold_on_path(&self, c: &Concept, path: &mut Vec<String>) -> Result<Concept> {
        let all = |cs: &[Concept], path: &mut Vec<String>| -> Result<Vec<Concept>> {
            cs.iter().map(|c| self.unfold_on_path(c, path)).collect()
        };
        Ok(match c {
            Concept::Top | Concept::Bottom | Concept::AtLeast(..) => c.clone(),
            Concept::Atom(name) => match self.get(name) {
                None => c.clone(),
                Some(def) => {
                    if path.iter().any(|p| p == name) {
                        let mut cycle = path.clone();
                        cycle.push(name.clone());
                        return Err(Error::CyclicTBox { path: cycle });
                    }
                    path.push(name.clone());
                    let body = self.unfold_on_path(&def.body, path)?;
                    path.pop();
                    match def.kind {
                        DefinitionKind::Equiv => body,
                        DefinitionKind::Subsumed => {
                            let mut parts = vec![Concept::Atom(marker_name(name))];
                            match body {
                                Concept::And(cs) => parts.extend(cs),
                                Concept::Top => {}
                                other => parts.push(other),
                            }
                            Concept::and(parts)
                        }
                    }
                }
            },
            Concept::Not(inner) => Concept::not(self.unfold_on_path(inner, path)?),
            Concept::And(cs) => Concept::And(all(cs, path)?),
            Concept::Or(cs) => Concept::Or(all(cs, path)?),
            Concept::Exists(r, f) => Concept::exists(r.clone(), self.unfold_on_path(f, path)?),
            Concept::Forall(r, f) => Concept::forall(r.clone(), self.unfold_on_path(f, path)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConceptAssertion {
    pub concept: String,
    pub individual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoleAssertion {
    pub role: String,
    pub subject: String,
    pub object: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ABox {
    concept_assertions: IndexSet<ConceptAssertion>,
    role_assertions: IndexSet<RoleAssertion>,
    individuals: BTreeSet<String>,
}

impl ABox {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assert_concept(&mut self, concept: impl Into<String>, individual: impl Into<String>) {
        let individual = individual.into();
        self.individuals.insert(individual.clone());
        self.concept_assertions.insert(ConceptAssertion { concept: concept.into(), individual });
    }

    pub fn assert_role(&mut self, role: impl Into<String>, subject: impl Into<String>, object: impl Into<String>) {
        let (subject, object) = (subject.into(), object.into());
        self.individuals.insert(subject.clone());
        self.individuals.insert(object.clone());
        self.role_assertions.insert(RoleAssertion { role: role.into(), subject, object });
    }

    pub fn concept_assertions(&self) -> impl ExactSizeIterator<Item = &ConceptAssertion> {
        self.concept_assertions.iter()
    }

    pub fn role_assertions(&self) -> impl ExactSizeIterator<Item = &RoleAssertion> {
        self.role_assertions.iter()
    }

    /// All individual names, sorted.
    pub fn individuals(&self) -> &BTreeSet<String> {
        &self.individuals
    }

    pub fn len(&self) -> usize {
        self.concept_assertions.len() + self.role_assertions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
    pub individuals: BTreeSet<String>,
}

/// A TBox and an ABox together with the names they use.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub tbox: TBox,
    pub abox: ABox,
    signature: Signature,
}

impl KnowledgeBase {
    /// Bundles the two components, computing the signature and checking that
    /// the terminology is acyclic.
    pub fn new(tbox: TBox, abox: ABox) -> Result<Self> {
        tbox.check_acyclic()?;
        let mut sig = Signature::default();
        for (name, def) in tbox.iter() {
            sig.concepts.insert(name.to_string());
            sig.concepts.extend(def.body.concept_names().into_iter().map(str::to_string));
            sig.roles.extend(def.body.role_names().into_iter().map(str::to_string));
        }
        for ca in abox.concept_assertions() {
            sig.concepts.insert(ca.concept.clone());
        }
        for ra in abox.role_assertions() {
            sig.roles.insert(ra.role.clone());
        }
        sig.individuals = abox.individuals().clone();
        Ok(KnowledgeBase { tbox, abox, signature: sig })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn individuals(&self) -> &BTreeSet<String> {
        &self.signature.individuals
    }

    pub fn has_individual(&self, name: &str) -> bool {
        self.signature.individuals.contains(name)
    }

    pub(crate) fn require_individual(&self, name: &str) -> Result<()> {
        if self.has_individual(name) {
            Ok(())
        } else {
            Err(Error::UnknownIndividual(name.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Concept {
        Concept::atom(n)
    }

    fn family_tbox() -> TBox {
        let mut t = TBox::new();
        t.define("Woman", DefinitionKind::Equiv, Concept::And(vec![a("Human"), a("Female")])).unwrap();
        t.define("Man", DefinitionKind::Equiv, Concept::And(vec![a("Human"), a("Male")])).unwrap();
        t
    }

    #[test]
    fn unfold_equiv() {
        let t = family_tbox();
        assert_eq!(t.unfold(&a("Woman")).unwrap(), Concept::And(vec![a("Human"), a("Female")]));
        assert_eq!(t.unfold(&a("P")).unwrap(), a("P"));
    }

    #[test]
    fn unfold_partial_uses_marker() {
        let mut t = TBox::new();
        t.define("Male", DefinitionKind::Subsumed, a("Person")).unwrap();
        assert_eq!(t.unfold(&a("Male")).unwrap(), Concept::And(vec![a("Male*"), a("Person")]));
    }

    #[test]
    fn unfold_leaves_no_defined_name() {
        let mut t = family_tbox();
        t.define("Mother", DefinitionKind::Equiv, Concept::And(vec![a("Woman"), Concept::exists("HasChild", a("Human"))]))
            .unwrap();
        let u = t.unfold(&Concept::forall("R", a("Mother"))).unwrap();
        assert!(u.concept_names().iter().all(|n| t.get(n).is_none()));
    }

    #[test]
    fn cycle_detection() {
        let mut t = TBox::new();
        t.define("A", DefinitionKind::Equiv, Concept::exists("R", a("B"))).unwrap();
        t.define("B", DefinitionKind::Equiv, Concept::And(vec![a("A"), a("C")])).unwrap();
        assert!(matches!(t.check_acyclic(), Err(Error::CyclicTBox { .. })));
        assert!(matches!(t.unfold(&a("A")), Err(Error::CyclicTBox { .. })));
        assert!(family_tbox().check_acyclic().is_ok());
    }

    #[test]
    fn duplicate_definition_rejected() {
        let mut t = family_tbox();
        assert!(t.define("Woman", DefinitionKind::Subsumed, a("Human")).is_err());
    }

    #[test]
    fn signature_collects_names() {
        let mut ab = ABox::new();
        ab.assert_concept("Woman", "claudia");
        ab.assert_role("HasParent", "claudia", "giovanna");
        let kb = KnowledgeBase::new(family_tbox(), ab).unwrap();
        let sig = kb.signature();
        assert!(sig.concepts.contains("Female") && sig.concepts.contains("Man"));
        assert_eq!(sig.roles.len(), 1);
        assert_eq!(sig.individuals.len(), 2);
    }
}
