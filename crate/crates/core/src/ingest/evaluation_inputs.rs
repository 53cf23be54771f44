use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use super::{open, IngestError, Tsv};
use crate::model::{ConceptId, Curie};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CohortGroup {
    Case,
    Control,
}

impl CohortGroup {
    pub fn as_str(self) -> &'static str {
        match self {
            CohortGroup::Case => "CASE",
            CohortGroup::Control => "CONTROL",
        }
    }
}

fn parse_curie(path: &str, line: u64, s: &str) -> Result<Curie, IngestError> {
    Curie::parse(s).map_err(|_| IngestError::BadCurie {
        path: path.to_string(),
        line,
        curie: s.to_string(),
    })
}

fn malformed(path: &str, line: u64, message: String) -> IngestError {
    IngestError::MalformedRow {
        path: path.to_string(),
        line,
        message,
    }
}

/// `hpo_curie weight`; weights must be finite and non-negative.
pub fn read_phenotype_weights<R: Read>(path: &str, input: R) -> Result<BTreeMap<Curie, f64>, IngestError> {
    let mut tsv = Tsv::new(path, input, &["hpo_curie", "weight"])?;
    let (c, w) = (tsv.col("hpo_curie"), tsv.col("weight"));
    let path = tsv.path.clone();
    let mut out = BTreeMap::new();
    for row in tsv.rows() {
        let row = row?;
        let curie = parse_curie(&path, row.line, row.get(c))?;
        let weight: f64 = row
            .get(w)
            .parse()
            .ok()
            .filter(|x: &f64| x.is_finite() && *x >= 0.0)
            .ok_or_else(|| malformed(&path, row.line, format!("weight {:?}", row.get(w))))?;
        if out.insert(curie.clone(), weight).is_some() {
            return Err(IngestError::DuplicateCurie {
                path: path.clone(),
                line: row.line,
                curie: curie.to_string(),
            });
        }
    }
    Ok(out)
}

/// `patient_id hpo_curie`, one observed phenotype per row.
pub fn read_patient_phenotypes<R: Read>(
    path: &str,
    input: R,
) -> Result<BTreeMap<String, BTreeSet<Curie>>, IngestError> {
    let mut tsv = Tsv::new(path, input, &["patient_id", "hpo_curie"])?;
    let (p, c) = (tsv.col("patient_id"), tsv.col("hpo_curie"));
    let path = tsv.path.clone();
    let mut out: BTreeMap<String, BTreeSet<Curie>> = BTreeMap::new();
    for row in tsv.rows() {
        let row = row?;
        let patient = row.get(p);
        if patient.is_empty() {
            return Err(malformed(&path, row.line, "empty patient_id".into()));
        }
        let curie = parse_curie(&path, row.line, row.get(c))?;
        out.entry(patient.to_string()).or_default().insert(curie);
    }
    Ok(out)
}

/// `patient_id group` with group CASE or CONTROL.
pub fn read_cohort<R: Read>(path: &str, input: R) -> Result<BTreeMap<String, CohortGroup>, IngestError> {
    let mut tsv = Tsv::new(path, input, &["patient_id", "group"])?;
    let (p, g) = (tsv.col("patient_id"), tsv.col("group"));
    let path = tsv.path.clone();
    let mut out = BTreeMap::new();
    for row in tsv.rows() {
        let row = row?;
        let patient = row.get(p);
        if patient.is_empty() {
            return Err(malformed(&path, row.line, "empty patient_id".into()));
        }
        let group = match row.get(g).to_ascii_uppercase().as_str() {
            "CASE" => CohortGroup::Case,
            "CONTROL" => CohortGroup::Control,
            other => return Err(malformed(&path, row.line, format!("group {other:?}"))),
        };
        if out.insert(patient.to_string(), group).is_some() {
            return Err(IngestError::DuplicateId {
                path: path.clone(),
                line: row.line,
                id: patient.to_string(),
            });
        }
    }
    Ok(out)
}

/// A single `concept_id` column; used for the auxiliary error-analysis lists.
pub fn read_concept_list<R: Read>(path: &str, input: R) -> Result<BTreeSet<ConceptId>, IngestError> {
    let mut tsv = Tsv::new(path, input, &["concept_id"])?;
    let c = tsv.col("concept_id");
    let path = tsv.path.clone();
    let mut out = BTreeSet::new();
    for row in tsv.rows() {
        let row = row?;
        let id = row
            .get(c)
            .parse()
            .map_err(|e| malformed(&path, row.line, format!("concept_id: {e}")))?;
        out.insert(id);
    }
    Ok(out)
}

pub fn load_phenotype_weights(path: &Path) -> Result<BTreeMap<Curie, f64>, IngestError> {
    read_phenotype_weights(&path.display().to_string(), open(path)?)
}

pub fn load_patient_phenotypes(path: &Path) -> Result<BTreeMap<String, BTreeSet<Curie>>, IngestError> {
    read_patient_phenotypes(&path.display().to_string(), open(path)?)
}

pub fn load_cohort(path: &Path) -> Result<BTreeMap<String, CohortGroup>, IngestError> {
    read_cohort(&path.display().to_string(), open(path)?)
}

pub fn load_concept_list(path: &Path) -> Result<BTreeSet<ConceptId>, IngestError> {
    read_concept_list(&path.display().to_string(), open(path)?)
}
