use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::EvalError;
use crate::ingest::CohortGroup;
use crate::model::Curie;

/// Standard deviation used for standardization, recorded in outputs.
pub const SD_KIND: &str = "sample (n - 1)";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohortStats {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatientScore {
    pub patient_id: String,
    pub raw: f64,
    pub standardized: f64,
    pub group: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhersResult {
    pub scores: Vec<PatientScore>,
    /// Statistics of the raw scores over the scored cohort.
    pub raw_stats: CohortStats,
}

/// Mean, median, sample sd, min and max. Empty input gives zeros.
pub fn cohort_stats(values: &[f64]) -> CohortStats {
    let n = values.len();
    if n == 0 {
        return CohortStats { n, mean: 0.0, median: 0.0, sd: 0.0, min: 0.0, max: 0.0 };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    CohortStats { n, mean, median, sd, min: sorted[0], max: sorted[n - 1] }
}

/// `(r − mean) / sd` with the sample standard deviation.
pub fn standardize(raw: &[f64]) -> Result<Vec<f64>, EvalError> {
    if raw.len() < 2 {
        return Err(EvalError::TooFewPatients(raw.len()));
    }
    let s = cohort_stats(raw);
    if s.sd == 0.0 || !s.sd.is_finite() {
        return Err(EvalError::DegenerateCohort);
    }
    Ok(raw.iter().map(|r| (r - s.mean) / s.sd).collect())
}

/// Raw score = sum of weights of observed phenotypes; standardized over the
/// scored patients. With a cohort, exactly the cohort's patients are scored
/// (patients without phenotype rows score 0); otherwise every patient with
/// phenotype rows is.
pub fn phers(
    patients: &BTreeMap<String, BTreeSet<Curie>>,
    weights: &BTreeMap<Curie, f64>,
    cohort: Option<&BTreeMap<String, CohortGroup>>,
) -> Result<PhersResult, EvalError> {
    let empty = BTreeSet::new();
    let ids: Vec<(&String, Option<CohortGroup>)> = match cohort {
        Some(c) => c.iter().map(|(p, g)| (p, Some(*g))).collect(),
        None => patients.keys().map(|p| (p, None)).collect(),
    };
    let raw: Vec<f64> = ids
        .iter()
        .map(|(p, _)| {
            patients
                .get(*p)
                .unwrap_or(&empty)
                .iter()
                .filter_map(|c| weights.get(c))
                .fold(0.0, |acc, w| acc + w)
        })
        .collect();
    let z = standardize(&raw)?;
    let scores = ids
        .iter()
        .zip(raw.iter().zip(&z))
        .map(|((p, g), (&raw, &standardized))| PatientScore {
            patient_id: (*p).clone(),
            raw,
            standardized,
            group: g.map(CohortGroup::as_str),
        })
        .collect();
    Ok(PhersResult { scores, raw_stats: cohort_stats(&raw) })
}
