use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use super::{open, split_multi, IngestError, Tsv};
use crate::model::{ConceptId, Curie, Ontology, Outcome, ResultTarget, Scale, UnmappedReason};
use crate::synth::RoutingPolicy;

/// Parses `semantic_type action value` with action ALLOW (value: ontology
/// list, `|` or `,` separated) or EXCLUDE (value: unmapped reason).
pub fn read_routing_policy<R: Read>(path: &str, input: R) -> Result<RoutingPolicy, IngestError> {
    let mut tsv = Tsv::new(path, input, &["semantic_type", "action", "value"])?;
    let (s, a, v) = (tsv.col("semantic_type"), tsv.col("action"), tsv.col("value"));
    let path = tsv.path.clone();
    let mut policy = RoutingPolicy::new();
    for row in tsv.rows() {
        let row = row?;
        let line = row.line;
        let bad = |message: String| IngestError::MalformedRow {
            path: path.clone(),
            line,
            message,
        };
        let sty = row.get(s);
        if sty.is_empty() {
            return Err(bad("empty semantic_type".into()));
        }
        match row.get(a).to_ascii_uppercase().as_str() {
            "ALLOW" => {
                let ontologies = row
                    .get(v)
                    .split(['|', ','])
                    .map(str::trim)
                    .filter(|x| !x.is_empty())
                    .map(|x| {
                        x.parse::<Ontology>().map_err(|_| IngestError::UnknownOntology {
                            path: path.clone(),
                            line,
                            value: x.to_string(),
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                policy.allow(sty, ontologies);
            }
            "EXCLUDE" => {
                let reason: UnmappedReason = row.get(v).parse().map_err(|_| IngestError::UnknownReason {
                    path: path.clone(),
                    line,
                    value: row.get(v).to_string(),
                })?;
                policy
                    .exclude(sty, reason)
                    .map_err(|prev| bad(format!("{sty:?} already excluded as {prev}")))?;
            }
            other => return Err(bad(format!("unknown action {other:?}"))),
        }
    }
    Ok(policy)
}

pub fn load_routing_policy(path: &Path) -> Result<RoutingPolicy, IngestError> {
    read_routing_policy(&path.display().to_string(), open(path)?)
}

/// Kind of reference-range data available for a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReferenceRangeKind {
    Numeric,
    PosNeg,
    None,
}

impl std::str::FromStr for ReferenceRangeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "NUMERIC" => Ok(ReferenceRangeKind::Numeric),
            "POS_NEG" => Ok(ReferenceRangeKind::PosNeg),
            "NONE" | "" => Ok(ReferenceRangeKind::None),
            _ => Err(format!("unknown reference_range_kind {s:?}")),
        }
    }
}

/// Scale metadata for one measurement concept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementScaleRow {
    pub concept_id: ConceptId,
    pub scale: Scale,
    pub reference_range: ReferenceRangeKind,
    /// Set when the concept is purposefully left unmapped (e.g. unspecified sample).
    pub exclusion: Option<UnmappedReason>,
}

/// Parses `concept_id scale reference_range_kind [exclusion]`.
pub fn read_measurement_scales<R: Read>(
    path: &str,
    input: R,
) -> Result<BTreeMap<ConceptId, MeasurementScaleRow>, IngestError> {
    let mut tsv = Tsv::new(path, input, &["concept_id", "scale", "reference_range_kind"])?;
    let (c, s, r) = (tsv.col("concept_id"), tsv.col("scale"), tsv.col("reference_range_kind"));
    let x = tsv.column("exclusion");
    let path = tsv.path.clone();
    let mut out = BTreeMap::new();
    for row in tsv.rows() {
        let row = row?;
        let line = row.line;
        let bad = |message: String| IngestError::MalformedRow {
            path: path.clone(),
            line,
            message,
        };
        let concept_id: ConceptId = row.get(c).parse().map_err(|e| bad(format!("concept_id: {e}")))?;
        let scale: Scale = row.get(s).parse().map_err(|e| bad(format!("{e}")))?;
        let reference_range: ReferenceRangeKind = row.get(r).parse().map_err(bad)?;
        let exclusion = match x.map(|i| row.get(i)).unwrap_or("") {
            "" => None,
            v => Some(v.parse::<UnmappedReason>().map_err(|_| IngestError::UnknownReason {
                path: path.clone(),
                line,
                value: v.to_string(),
            })?),
        };
        let entry = MeasurementScaleRow {
            concept_id,
            scale,
            reference_range,
            exclusion,
        };
        if out.insert(concept_id, entry).is_some() {
            return Err(IngestError::DuplicateId {
                path: path.clone(),
                line,
                id: concept_id.to_string(),
            });
        }
    }
    Ok(out)
}

pub fn load_measurement_scales(path: &Path) -> Result<BTreeMap<ConceptId, MeasurementScaleRow>, IngestError> {
    read_measurement_scales(&path.display().to_string(), open(path)?)
}

/// Per-outcome result targets and per-concept auxiliary targets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MeasurementTargets {
    pub results: BTreeMap<ConceptId, BTreeMap<Outcome, ResultTarget>>,
    pub auxiliary: BTreeMap<ConceptId, BTreeMap<Ontology, Vec<Curie>>>,
}

/// Parses `concept_id outcome curie negated`. Rows whose outcome column
/// holds an ontology key instead of an outcome are auxiliary targets.
/// NORMAL and NEGATIVE targets are always negated; an explicit `negated`
/// value that disagrees is rejected.
pub fn read_measurement_targets<R: Read>(path: &str, input: R) -> Result<MeasurementTargets, IngestError> {
    let mut tsv = Tsv::new(path, input, &["concept_id", "outcome", "curie"])?;
    let (c, o, u) = (tsv.col("concept_id"), tsv.col("outcome"), tsv.col("curie"));
    let n = tsv.column("negated");
    let path = tsv.path.clone();
    let mut out = MeasurementTargets::default();
    for row in tsv.rows() {
        let row = row?;
        let line = row.line;
        let bad = |message: String| IngestError::MalformedRow {
            path: path.clone(),
            line,
            message,
        };
        let concept_id: ConceptId = row.get(c).parse().map_err(|e| bad(format!("concept_id: {e}")))?;
        let curies = split_multi(row.get(u))
            .map(|t| {
                Curie::parse(t).map_err(|_| IngestError::BadCurie {
                    path: path.clone(),
                    line,
                    curie: t.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let key = row.get(o);
        if let Ok(outcome) = key.parse::<Outcome>() {
            let [curie] = <[Curie; 1]>::try_from(curies).map_err(|_| bad("result rows take exactly one CURIE".into()))?;
            let negated = match n.map(|i| row.get(i)).unwrap_or("") {
                "" => outcome.is_negated(),
                "1" | "true" | "TRUE" => true,
                "0" | "false" | "FALSE" => false,
                v => return Err(bad(format!("negated: {v:?}"))),
            };
            if negated != outcome.is_negated() {
                return Err(bad(format!("{outcome} target must {}be negated", if negated { "not " } else { "" })));
            }
            let slot = out.results.entry(concept_id).or_default();
            if slot.insert(outcome, ResultTarget { curie, negated }).is_some() {
                return Err(IngestError::DuplicateId {
                    path: path.clone(),
                    line,
                    id: format!("{concept_id}/{outcome}"),
                });
            }
        } else if let Ok(ontology) = key.parse::<Ontology>() {
            if curies.is_empty() {
                return Err(bad("auxiliary row without CURIE".into()));
            }
            if let Some(t) = curies.iter().find(|t| t.ontology() != ontology) {
                return Err(bad(format!("{t} is not in ontology {}", ontology.key())));
            }
            let list = out.auxiliary.entry(concept_id).or_default().entry(ontology).or_default();
            list.extend(curies);
            list.sort();
            list.dedup();
        } else {
            return Err(bad(format!("{key:?} is neither a result outcome nor an ontology")));
        }
    }
    Ok(out)
}

pub fn load_measurement_targets(path: &Path) -> Result<MeasurementTargets, IngestError> {
    read_measurement_targets(&path.display().to_string(), open(path)?)
}
