//! Parsers for every input file. All errors carry the 1-based line number of
//! the offending row.

use std::collections::HashMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

mod concepts;
mod curation;
mod evaluation_inputs;
mod ontology;
mod policy;
mod prevalence;
mod umls;

pub use concepts::{load_concepts, read_concepts, write_concept_ancestors, write_concepts, ConceptSet};
pub use curation::{load_curation, read_curation, write_curation, CurationRow};
pub use evaluation_inputs::{
    load_cohort, load_concept_list, load_patient_phenotypes, load_phenotype_weights, read_cohort,
    read_concept_list, read_patient_phenotypes, read_phenotype_weights, CohortGroup,
};
pub use ontology::{load_class_ancestors, load_ontology_dump, read_ontology_dump, write_class_ancestors, write_ontology_dump, OntologySet};
pub use policy::{
    load_measurement_scales, load_measurement_targets, load_routing_policy, read_measurement_scales,
    read_measurement_targets, read_routing_policy, MeasurementScaleRow,
    MeasurementTargets, ReferenceRangeKind,
};
pub use prevalence::{load_prevalence, read_prevalence, SiteFrequency, PREVALENCE_FLOOR};
pub use umls::{load_umls, parse_mrconso, parse_mrsty, SemanticTypeRow, UmlsAtom, UmlsIndex};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{path}: missing column {column:?}")]
    MissingColumn { path: String, column: String },
    #[error("{path}:{line}: duplicate id {id}")]
    DuplicateId { path: String, line: u64, id: String },
    #[error("{path}:{line}: malformed row: {message}")]
    MalformedRow { path: String, line: u64, message: String },
    #[error("{path}:{line}: bad CURIE {curie:?}")]
    BadCurie { path: String, line: u64, curie: String },
    #[error("{path}:{line}: duplicate CURIE {curie}")]
    DuplicateCurie { path: String, line: u64, curie: String },
    #[error("{path}:{line}: malformed line: {message}")]
    MalformedLine { path: String, line: u64, message: String },
    #[error("{path}:{line}: row has {fields} fields, expected at least {expected}")]
    ShortRow { path: String, line: u64, fields: usize, expected: usize },
    #[error("{path}:{line}: bad CUI {cui:?}")]
    BadCui { path: String, line: u64, cui: String },
    #[error("{path}:{line}: unknown ontology {value:?}")]
    UnknownOntology { path: String, line: u64, value: String },
    #[error("{path}:{line}: row has both targets and an unmapped reason")]
    BothTargetsAndReason { path: String, line: u64 },
    #[error("{path}:{line}: unknown unmapped reason {value:?}")]
    UnknownReason { path: String, line: u64, value: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl IngestError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            IngestError::MissingColumn { .. } => "MISSING_COLUMN",
            IngestError::DuplicateId { .. } => "DUPLICATE_ID",
            IngestError::MalformedRow { .. } => "MALFORMED_ROW",
            IngestError::BadCurie { .. } => "BAD_CURIE",
            IngestError::DuplicateCurie { .. } => "DUPLICATE_CURIE",
            IngestError::MalformedLine { .. } => "MALFORMED_LINE",
            IngestError::ShortRow { .. } => "SHORT_ROW",
            IngestError::BadCui { .. } => "BAD_CUI",
            IngestError::UnknownOntology { .. } => "UNKNOWN_ONTOLOGY",
            IngestError::BothTargetsAndReason { .. } => "BOTH_TARGETS_AND_REASON",
            IngestError::UnknownReason { .. } => "UNKNOWN_REASON",
            IngestError::Io { .. } => "IO",
        }
    }

    /// Line number of the offending row, when the error is tied to one.
    pub fn line(&self) -> Option<u64> {
        match self {
            IngestError::DuplicateId { line, .. }
            | IngestError::MalformedRow { line, .. }
            | IngestError::BadCurie { line, .. }
            | IngestError::DuplicateCurie { line, .. }
            | IngestError::MalformedLine { line, .. }
            | IngestError::ShortRow { line, .. }
            | IngestError::BadCui { line, .. }
            | IngestError::UnknownOntology { line, .. }
            | IngestError::BothTargetsAndReason { line, .. }
            | IngestError::UnknownReason { line, .. } => Some(*line),
            IngestError::MissingColumn { .. } | IngestError::Io { .. } => None,
        }
    }
}

/// Non-fatal findings from a load.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub warnings: Vec<String>,
    /// Ancestor rows whose ancestor id is not in the loaded set.
    pub dangling_ancestors: usize,
    /// Prevalence counts raised to the floor.
    pub floored: usize,
}

impl LoadReport {
    pub fn merge(&mut self, other: LoadReport) {
        self.warnings.extend(other.warnings);
        self.dangling_ancestors += other.dangling_ancestors;
        self.floored += other.floored;
    }
}

pub(crate) fn open(path: &Path) -> Result<BufReader<File>, IngestError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| IngestError::Io {
            path: path.display().to_string(),
            source,
        })
}

/// A tab-separated table with a header row, read record by record.
pub(crate) struct Tsv<R: std::io::Read> {
    pub path: String,
    columns: HashMap<String, usize>,
    reader: csv::Reader<R>,
}

pub(crate) struct TsvRow {
    pub line: u64,
    record: csv::StringRecord,
}

impl TsvRow {
    pub fn get(&self, idx: usize) -> &str {
        self.record.get(idx).unwrap_or("").trim()
    }
}

impl<R: std::io::Read> Tsv<R> {
    pub fn new(path: impl Into<String>, input: R, required: &[&str]) -> Result<Self, IngestError> {
        let path = path.into();
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .quoting(false)
            .flexible(true)
            .has_headers(true)
            .from_reader(input);
        let headers = reader.headers().map_err(|e| IngestError::MalformedRow {
            path: path.clone(),
            line: 1,
            message: e.to_string(),
        })?;
        let columns: HashMap<String, usize> = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim().to_string(), i))
            .collect();
        for col in required {
            if !columns.contains_key(*col) {
                return Err(IngestError::MissingColumn {
                    path,
                    column: col.to_string(),
                });
            }
        }
        Ok(Self {
            path,
            columns,
            reader,
        })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.get(name).copied()
    }

    /// Index of a column that `new` already checked for.
    pub fn col(&self, name: &str) -> usize {
        self.columns[name]
    }

    pub fn rows(&mut self) -> impl Iterator<Item = Result<TsvRow, IngestError>> + '_ {
        let path = self.path.clone();
        self.reader.records().map(move |r| match r {
            Ok(record) => Ok(TsvRow {
                line: record.position().map(|p| p.line()).unwrap_or(0),
                record,
            }),
            Err(e) => Err(IngestError::MalformedRow {
                path: path.clone(),
                line: e.position().map(|p| p.line()).unwrap_or(0),
                message: e.to_string(),
            }),
        })
    }
}

pub(crate) fn split_multi(cell: &str) -> impl Iterator<Item = &str> {
    cell.split('|').map(str::trim).filter(|s| !s.is_empty())
}
