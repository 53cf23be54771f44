use std::collections::BTreeMap;

use super::SynthError;
use crate::ingest::{MeasurementScaleRow, ReferenceRangeKind};
use crate::model::{
    ClinicalConcept, Curie, EvidenceAtom, EvidenceKind, Level, Logic, MappingCategory,
    MappingRecord, MeasurementResultSpec, Ontology, Outcome, ResultTarget, ResultType, Scale, Term,
};

/// Words in a label or synonym that mark a presence/screening test.
const PRESENCE_WORDS: [&str; 2] = ["presence", "screen"];

/// Scale from explicit metadata, else from the fifth part of a
/// colon-separated fully specified name among the concept's strings.
pub fn derive_scale(concept: &ClinicalConcept, row: Option<&MeasurementScaleRow>) -> Scale {
    if let Some(r) = row {
        return r.scale;
    }
    concept
        .strings()
        .filter_map(|(s, _)| {
            let parts: Vec<&str> = s.split(':').collect();
            (parts.len() >= 5).then(|| parts[4].parse::<Scale>().ok()).flatten()
        })
        .next()
        .unwrap_or(Scale::Unknown)
}

fn mentions_presence(concept: &ClinicalConcept) -> bool {
    concept.strings().any(|(s, _)| {
        s.split(|c: char| !c.is_alphanumeric())
            .any(|w| PRESENCE_WORDS.iter().any(|p| w.eq_ignore_ascii_case(p)))
    })
}

/// Result type, decided in order: reference-range data, then ordinal scale
/// or a presence/screen word, then quantitative scale, else unknown.
pub fn derive_result_type(concept: &ClinicalConcept, scale: Scale, range: ReferenceRangeKind) -> ResultType {
    match range {
        ReferenceRangeKind::Numeric => return ResultType::NormalLowHigh,
        ReferenceRangeKind::PosNeg => return ResultType::PositiveNegative,
        ReferenceRangeKind::None => {}
    }
    if scale == Scale::Ordinal || mentions_presence(concept) {
        ResultType::PositiveNegative
    } else if scale == Scale::Quantitative {
        ResultType::NormalLowHigh
    } else {
        ResultType::UnknownResultType
    }
}

/// Per-result and auxiliary records of a measurement concept.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementExpansion {
    pub spec: MeasurementResultSpec,
    /// One MANUAL_ONE_TO_ONE record per outcome, `result` set.
    pub result_records: Vec<MappingRecord>,
    /// One record per auxiliary ontology; replaces that ontology's regular record.
    pub auxiliary_records: Vec<MappingRecord>,
    /// Set when the concept is purposefully unmapped; all ontologies get this reason.
    pub exclusion: Option<crate::model::UnmappedReason>,
}

fn completed_assignments(
    concept: &ClinicalConcept,
    result_type: ResultType,
    given: &BTreeMap<Outcome, ResultTarget>,
) -> Result<BTreeMap<Outcome, ResultTarget>, SynthError> {
    let mut out = given.clone();
    if given.is_empty() {
        return Ok(out);
    }
    if let Some(o) = given.keys().find(|o| !result_type.outcomes().contains(o)) {
        return Err(SynthError::ResultTypeMismatch {
            concept_id: concept.concept_id,
            outcome: *o,
            result_type,
        });
    }
    if result_type == ResultType::PositiveNegative {
        // the negative result is the negation of the positive class, and back
        match (given.get(&Outcome::Positive), given.get(&Outcome::Negative)) {
            (Some(p), None) => {
                out.insert(Outcome::Negative, ResultTarget { curie: p.curie.clone(), negated: true });
            }
            (None, Some(n)) => {
                out.insert(Outcome::Positive, ResultTarget { curie: n.curie.clone(), negated: false });
            }
            _ => {}
        }
    }
    for &o in result_type.outcomes() {
        if !out.contains_key(&o) {
            return Err(SynthError::MissingTargetForResult {
                concept_id: concept.concept_id,
                outcome: o,
            });
        }
    }
    Ok(out)
}

fn auxiliary_record(concept: &ClinicalConcept, ontology: Ontology, targets: &[Curie]) -> MappingRecord {
    let category = if targets.len() == 1 {
        MappingCategory::ManualOneToOneConcept
    } else {
        MappingCategory::ManualOneToManyConcept
    };
    MappingRecord {
        concept_id: concept.concept_id,
        domain: concept.domain,
        ontology,
        category,
        level: Level::Concept,
        logic: Some(Logic::conjunction(targets.len())),
        targets: targets.to_vec(),
        score: None,
        evidence: vec![EvidenceAtom::new(EvidenceKind::ManualSource, "measurement auxiliary target")],
        unmapped_reason: None,
        result: None,
    }
}

/// Types a measurement's results and expands assigned targets into
/// per-result records (NORMAL and NEGATIVE negated), plus auxiliary records.
pub fn expand_measurements(
    concept: &ClinicalConcept,
    scale_row: Option<&MeasurementScaleRow>,
    assignments: Option<&BTreeMap<Outcome, ResultTarget>>,
    auxiliary: Option<&BTreeMap<Ontology, Vec<Curie>>>,
) -> Result<MeasurementExpansion, SynthError> {
    let scale = derive_scale(concept, scale_row);
    let range = scale_row.map_or(ReferenceRangeKind::None, |r| r.reference_range);
    let result_type = derive_result_type(concept, scale, range);
    let exclusion = scale_row.and_then(|r| r.exclusion);
    let empty = BTreeMap::new();
    let given = if exclusion.is_some() { &empty } else { assignments.unwrap_or(&empty) };
    let assigned = completed_assignments(concept, result_type, given)?;
    let spec = MeasurementResultSpec {
        concept_id: concept.concept_id,
        scale,
        result_type,
        assignments: assigned,
    };
    spec.check().map_err(|e| SynthError::Invariant(e.to_string()))?;

    let result_records = spec
        .assignments
        .iter()
        .map(|(&outcome, target)| {
            let term = if target.negated { Term::Not(0) } else { Term::Target(0) };
            MappingRecord {
                concept_id: concept.concept_id,
                domain: concept.domain,
                ontology: target.curie.ontology(),
                category: MappingCategory::ManualOneToOneConcept,
                level: Level::Concept,
                logic: Some(Logic::Single(term)),
                targets: vec![target.curie.clone()],
                score: None,
                evidence: vec![EvidenceAtom::new(
                    EvidenceKind::ManualSource,
                    format!("{} result {}", result_type.as_str(), outcome.as_str()),
                )],
                unmapped_reason: None,
                result: Some(outcome),
            }
        })
        .collect();
    let auxiliary_records = match (exclusion, auxiliary) {
        (None, Some(aux)) => aux
            .iter()
            .filter(|(_, t)| !t.is_empty())
            .map(|(&o, t)| auxiliary_record(concept, o, t))
            .collect(),
        _ => Vec::new(),
    };
    Ok(MeasurementExpansion {
        spec,
        result_records,
        auxiliary_records,
        exclusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CodeRef, ConceptId, Domain};
    use std::collections::BTreeSet;

    fn measurement(id: u64, label: &str, synonyms: &[&str]) -> ClinicalConcept {
        ClinicalConcept {
            concept_id: ConceptId::new(id).unwrap(),
            vocabulary: "LOINC".into(),
            code: CodeRef::new("LOINC", "0-0").unwrap(),
            label: label.into(),
            synonyms: synonyms.iter().map(|s| s.to_string()).collect(),
            domain: Domain::Measurement,
            used_in_practice: true,
            record_count: 5,
            ancestors: vec![],
            semantic_types: BTreeSet::new(),
            cuis: BTreeSet::new(),
        }
    }

    fn target(c: &str, negated: bool) -> ResultTarget {
        ResultTarget { curie: Curie::parse(c).unwrap(), negated }
    }

    fn scale_row(id: u64, scale: Scale, range: ReferenceRangeKind) -> MeasurementScaleRow {
        MeasurementScaleRow {
            concept_id: ConceptId::new(id).unwrap(),
            scale,
            reference_range: range,
            exclusion: None,
        }
    }

    #[test]
    fn acth_normal_low_high() {
        let c = measurement(3, "Corticotropin [Mass/volume] in Plasma", &["Corticotropin:MCnc:Pt:Plas:Qn"]);
        let assigned: BTreeMap<_, _> = [
            (Outcome::High, target("HP:0003154", false)),
            (Outcome::Low, target("HP:0002920", false)),
            (Outcome::Normal, target("HP:0011043", true)),
        ]
        .into();
        let x = expand_measurements(&c, None, Some(&assigned), None).unwrap();
        assert_eq!(x.spec.scale, Scale::Quantitative);
        assert_eq!(x.spec.result_type, ResultType::NormalLowHigh);
        let rows: Vec<(Option<Outcome>, String, String)> = x
            .result_records
            .iter()
            .map(|r| (r.result, r.logic.as_ref().unwrap().to_string(), r.targets[0].to_string()))
            .collect();
        assert_eq!(
            rows,
            [
                (Some(Outcome::Low), "0".into(), "HP:0002920".into()),
                (Some(Outcome::High), "0".into(), "HP:0003154".into()),
                (Some(Outcome::Normal), "NOT(0)".into(), "HP:0011043".into()),
            ]
        );
    }

    #[test]
    fn ordinal_positive_derives_negative() {
        let c = measurement(4, "Amphetamines [Presence] in Urine", &[]);
        let assigned: BTreeMap<_, _> = [(Outcome::Positive, target("HP:0500112", false))].into();
        let x = expand_measurements(&c, Some(&scale_row(4, Scale::Ordinal, ReferenceRangeKind::None)), Some(&assigned), None)
            .unwrap();
        assert_eq!(x.spec.result_type, ResultType::PositiveNegative);
        assert_eq!(x.spec.assignments[&Outcome::Negative], target("HP:0500112", true));
        assert_eq!(x.result_records.len(), 2);
    }

    #[test]
    fn narrative_is_unknown_without_rows() {
        let c = measurement(5, "Pathology report", &[]);
        let x = expand_measurements(&c, Some(&scale_row(5, Scale::Narrative, ReferenceRangeKind::None)), None, None).unwrap();
        assert_eq!(x.spec.result_type, ResultType::UnknownResultType);
        assert!(x.result_records.is_empty());
    }

    #[test]
    fn derivation_order() {
        let plain = measurement(6, "Something", &[]);
        let screen = measurement(6, "Drug screen", &[]);
        assert_eq!(derive_result_type(&plain, Scale::Ordinal, ReferenceRangeKind::Numeric), ResultType::NormalLowHigh);
        assert_eq!(derive_result_type(&plain, Scale::Quantitative, ReferenceRangeKind::PosNeg), ResultType::PositiveNegative);
        assert_eq!(derive_result_type(&screen, Scale::Quantitative, ReferenceRangeKind::None), ResultType::PositiveNegative);
        assert_eq!(derive_result_type(&plain, Scale::Quantitative, ReferenceRangeKind::None), ResultType::NormalLowHigh);
        assert_eq!(derive_result_type(&plain, Scale::Nominal, ReferenceRangeKind::None), ResultType::UnknownResultType);
    }

    #[test]
    fn partial_normal_low_high_is_missing_target() {
        let c = measurement(7, "X", &[]);
        let assigned: BTreeMap<_, _> = [(Outcome::High, target("HP:0003154", false))].into();
        let e = expand_measurements(&c, Some(&scale_row(7, Scale::Quantitative, ReferenceRangeKind::Numeric)), Some(&assigned), None)
            .unwrap_err();
        assert_eq!(e.code(), "MISSING_TARGET_FOR_RESULT");
    }

    #[test]
    fn unspecified_sample_excluded() {
        let c = measurement(8, "X", &[]);
        let mut row = scale_row(8, Scale::Quantitative, ReferenceRangeKind::Numeric);
        row.exclusion = Some(crate::model::UnmappedReason::UnspecifiedSample);
        let x = expand_measurements(&c, Some(&row), None, None).unwrap();
        assert!(x.result_records.is_empty());
        assert_eq!(x.exclusion, Some(crate::model::UnmappedReason::UnspecifiedSample));
    }
}
