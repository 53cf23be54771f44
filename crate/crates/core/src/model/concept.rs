use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CodeRef, ConceptId, Cui, Curie, Domain, ModelError, Ontology};

/// A clinical vocabulary concept (a row of the concept table).
#[derive(Debug, Clone, PartialEq)]
pub struct ClinicalConcept {
    pub concept_id: ConceptId,
    pub vocabulary: String,
    pub code: CodeRef,
    pub label: String,
    pub synonyms: Vec<String>,
    pub domain: Domain,
    pub used_in_practice: bool,
    pub record_count: u64,
    pub ancestors: Vec<ConceptId>,
    pub semantic_types: BTreeSet<String>,
    pub cuis: BTreeSet<Cui>,
}

impl ClinicalConcept {
    /// Checks the per-concept invariants (count/usage consistency, no self-loop).
    pub fn check(&self) -> Result<(), ModelError> {
        if self.record_count == 0 && self.used_in_practice {
            return Err(ModelError::Invariant(format!(
                "concept {} is used in practice but has record_count 0",
                self.concept_id
            )));
        }
        if self.ancestors.contains(&self.concept_id) {
            return Err(ModelError::Invariant(format!(
                "concept {} lists itself as an ancestor",
                self.concept_id
            )));
        }
        Ok(())
    }

    /// Label followed by synonyms.
    pub fn strings(&self) -> impl Iterator<Item = (&str, StringRole)> {
        std::iter::once((self.label.as_str(), StringRole::Label))
            .chain(self.synonyms.iter().map(|s| (s.as_str(), StringRole::Synonym)))
    }
}

/// Whether a string is a label or a synonym of its owner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StringRole {
    Label,
    Synonym,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SynonymKind {
    Exact,
    Related,
    Broad,
    Narrow,
}

impl SynonymKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SynonymKind::Exact => "EXACT",
            SynonymKind::Related => "RELATED",
            SynonymKind::Broad => "BROAD",
            SynonymKind::Narrow => "NARROW",
        }
    }
}

impl fmt::Display for SynonymKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SynonymKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "EXACT" => Ok(SynonymKind::Exact),
            "RELATED" => Ok(SynonymKind::Related),
            "BROAD" => Ok(SynonymKind::Broad),
            "NARROW" => Ok(SynonymKind::Narrow),
            _ => Err(ModelError::Invariant(format!("unknown synonym kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Synonym {
    pub text: String,
    pub kind: SynonymKind,
}

/// An ontology class with the metadata used for alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct OntologyClass {
    pub curie: Curie,
    pub ontology: Ontology,
    pub label: String,
    pub definition: Option<String>,
    pub synonyms: Vec<Synonym>,
    pub xrefs: Vec<CodeRef>,
    pub ancestors: Vec<Curie>,
    pub deprecated: bool,
}

impl OntologyClass {
    /// Label followed by synonyms (definitions excluded).
    pub fn strings(&self) -> impl Iterator<Item = (&str, StringRole)> {
        std::iter::once((self.label.as_str(), StringRole::Label))
            .chain(self.synonyms.iter().map(|s| (s.text.as_str(), StringRole::Synonym)))
    }
}
