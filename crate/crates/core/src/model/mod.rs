//! Shared domain types: identifiers, concepts, ontology classes, mapping
//! records and their invariants.
//!
//! Everything here is immutable once built and `Send + Sync`, so loaded
//! indexes can be shared read-only across worker threads.

mod concept;
pub mod evidence;
mod ids;
mod logic;
mod measurement;
mod record;

pub use concept::{ClinicalConcept, OntologyClass, StringRole, Synonym, SynonymKind};
pub use evidence::{EvidenceAtom, EvidenceKind};
pub use ids::{CodeRef, ConceptId, Cui, Curie, Domain, Ontology};
pub use logic::{Logic, Term};
pub use measurement::{MeasurementResultSpec, Outcome, ResultTarget, ResultType, Scale};
pub use record::{
    render_category, validate_record, Level, MappingCategory, MappingRecord, UnmappedReason,
    Violation, ViolationKind,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("concept id must be positive")]
    ZeroConceptId,
    #[error("malformed concept id {0:?}")]
    BadConceptId(String),
    #[error("unknown domain {0:?}")]
    UnknownDomain(String),
    #[error("unknown ontology {0:?}")]
    UnknownOntology(String),
    #[error("malformed CURIE {0:?}")]
    BadCurie(String),
    #[error("malformed vocabulary prefix {0:?}")]
    BadPrefix(String),
    #[error("empty code")]
    EmptyCode,
    #[error("malformed CUI {0:?}")]
    BadCui(String),
    #[error("malformed logic expression {0:?}")]
    BadLogic(String),
    #[error("malformed evidence atom {0:?}")]
    BadEvidence(String),
    #[error("unknown unmapped reason {0:?}")]
    UnknownReason(String),
    #[error("{0}")]
    Invariant(String),
}
