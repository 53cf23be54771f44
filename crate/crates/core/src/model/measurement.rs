use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ConceptId, Curie, ModelError};

/// Measurement scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Scale {
    Ordinal,
    Nominal,
    Quantitative,
    Qualitative,
    Narrative,
    Doc,
    Panel,
    Unknown,
}

impl Scale {
    pub const ALL: [Scale; 8] = [
        Scale::Ordinal,
        Scale::Nominal,
        Scale::Quantitative,
        Scale::Qualitative,
        Scale::Narrative,
        Scale::Doc,
        Scale::Panel,
        Scale::Unknown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scale::Ordinal => "ORDINAL",
            Scale::Nominal => "NOMINAL",
            Scale::Quantitative => "QUANTITATIVE",
            Scale::Qualitative => "QUALITATIVE",
            Scale::Narrative => "NARRATIVE",
            Scale::Doc => "DOC",
            Scale::Panel => "PANEL",
            Scale::Unknown => "UNKNOWN",
        }
    }
}

impl FromStr for Scale {
    type Err = ModelError;

    /// Accepts full names and the LOINC scale abbreviations (`Qn`, `Ord`, ...).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_uppercase();
        let scale = match t.as_str() {
            "ORD" | "ORDQN" => Scale::Ordinal,
            "NOM" => Scale::Nominal,
            "QN" => Scale::Quantitative,
            "NAR" => Scale::Narrative,
            "PNL" => Scale::Panel,
            "" => Scale::Unknown,
            other => Scale::ALL
                .into_iter()
                .find(|sc| sc.as_str() == other)
                .ok_or_else(|| ModelError::Invariant(format!("unknown scale {s:?}")))?,
        };
        Ok(scale)
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Interpretable outcome family of a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ResultType {
    NormalLowHigh,
    PositiveNegative,
    UnknownResultType,
}

impl ResultType {
    pub fn as_str(self) -> &'static str {
        match self {
            ResultType::NormalLowHigh => "NORMAL_LOW_HIGH",
            ResultType::PositiveNegative => "POSITIVE_NEGATIVE",
            ResultType::UnknownResultType => "UNKNOWN_RESULT_TYPE",
        }
    }

    /// Outcomes a result type admits, in output order.
    pub fn outcomes(self) -> &'static [Outcome] {
        match self {
            ResultType::NormalLowHigh => &[Outcome::Low, Outcome::High, Outcome::Normal],
            ResultType::PositiveNegative => &[Outcome::Positive, Outcome::Negative],
            ResultType::UnknownResultType => &[],
        }
    }
}

impl fmt::Display for ResultType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single interpretable measurement result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Low,
    High,
    Normal,
    Positive,
    Negative,
}

impl Outcome {
    pub const ALL: [Outcome; 5] = [
        Outcome::Low,
        Outcome::High,
        Outcome::Normal,
        Outcome::Positive,
        Outcome::Negative,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Low => "LOW",
            Outcome::High => "HIGH",
            Outcome::Normal => "NORMAL",
            Outcome::Positive => "POSITIVE",
            Outcome::Negative => "NEGATIVE",
        }
    }

    /// Outcomes whose target is the logical negation of an abnormality class.
    pub fn is_negated(self) -> bool {
        matches!(self, Outcome::Normal | Outcome::Negative)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Outcome {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_uppercase();
        Outcome::ALL
            .into_iter()
            .find(|o| o.as_str() == t)
            .ok_or_else(|| ModelError::Invariant(format!("unknown result outcome {s:?}")))
    }
}

/// Target class for one outcome, possibly negated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultTarget {
    pub curie: Curie,
    pub negated: bool,
}

/// Result typing and per-outcome targets for a measurement concept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementResultSpec {
    pub concept_id: ConceptId,
    pub scale: Scale,
    pub result_type: ResultType,
    pub assignments: BTreeMap<Outcome, ResultTarget>,
}

impl MeasurementResultSpec {
    /// Outcomes must belong to the result type, and NORMAL/NEGATIVE must be negated.
    pub fn check(&self) -> Result<(), ModelError> {
        let allowed = self.result_type.outcomes();
        for (outcome, target) in &self.assignments {
            if !allowed.contains(outcome) {
                return Err(ModelError::Invariant(format!(
                    "outcome {outcome} not valid for {}",
                    self.result_type
                )));
            }
            if target.negated != outcome.is_negated() {
                return Err(ModelError::Invariant(format!(
                    "outcome {outcome} has wrong negation"
                )));
            }
        }
        Ok(())
    }
}
