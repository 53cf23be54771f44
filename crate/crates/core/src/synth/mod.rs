//! Fuses alignment candidates, cosine best pairs, curation and routing into
//! final mapping records, and expands measurements into per-result rows.

mod measurement;
mod routing;
mod synthesize;

pub use measurement::{
    derive_result_type, derive_scale, expand_measurements, MeasurementExpansion,
};
pub use routing::{Route, RoutingPolicy};
pub use synthesize::{
    cosine_payload, fallback_reason, from_curation, synthesize, ConceptEvidence, CosineBest,
};

use crate::model::{ConceptId, Ontology, Outcome, ResultType};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("concept {concept_id}: curation lines {} and {} both map ontology {}", lines.0, lines.1, ontology.key())]
    ConflictingCuration {
        concept_id: ConceptId,
        ontology: Ontology,
        lines: (u64, u64),
    },
    #[error("concept {concept_id}: no target assigned or derivable for result {outcome}")]
    MissingTargetForResult { concept_id: ConceptId, outcome: Outcome },
    #[error("concept {concept_id}: result {outcome} does not belong to {result_type}")]
    ResultTypeMismatch {
        concept_id: ConceptId,
        outcome: Outcome,
        result_type: ResultType,
    },
    #[error("{0}")]
    Invariant(String),
}

impl SynthError {
    pub fn code(&self) -> &'static str {
        match self {
            SynthError::ConflictingCuration { .. } => "CONFLICTING_CURATION",
            SynthError::MissingTargetForResult { .. } => "MISSING_TARGET_FOR_RESULT",
            SynthError::ResultTypeMismatch { .. } => "RESULT_TYPE_MISMATCH",
            SynthError::Invariant(_) => "INVARIANT",
        }
    }
}
