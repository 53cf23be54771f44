use std::collections::BTreeMap;

use super::{Route, SynthError};
use crate::align::CandidateMatch;
use crate::ingest::CurationRow;
use crate::model::{
    evidence::canonical_order, ClinicalConcept, EvidenceAtom, EvidenceKind, Level, Logic,
    MappingCategory, MappingRecord, Ontology, UnmappedReason,
};

/// The cosine winner for one (concept, ontology), with the strings behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct CosineBest {
    pub curie: crate::model::Curie,
    pub score: f64,
    pub concept_text: String,
    pub class_text: String,
}

/// Everything known about one concept when its records are synthesized.
#[derive(Debug, Clone)]
pub struct ConceptEvidence<'a> {
    pub concept: &'a ClinicalConcept,
    /// Target ontologies configured for the concept's domain, in output order.
    pub ontologies: &'a [Ontology],
    pub route: Route,
    pub concept_candidates: Vec<CandidateMatch>,
    pub ancestor_candidates: Vec<CandidateMatch>,
    pub cosine: BTreeMap<Ontology, CosineBest>,
    pub curation: Vec<&'a CurationRow>,
}

/// Rendering of a cosine score inside evidence.
pub fn cosine_payload(best: &CosineBest) -> String {
    format!("{:.4} ({} ~ {})", best.score, best.concept_text, best.class_text)
}

/// Reason given to a concept with nothing to map to.
pub fn fallback_reason(concept: &ClinicalConcept) -> UnmappedReason {
    if concept.used_in_practice {
        UnmappedReason::NoneFound
    } else {
        UnmappedReason::NotYetMapped
    }
}

fn from_candidates(
    concept: &ClinicalConcept,
    ontology: Ontology,
    level: Level,
    cands: &[&CandidateMatch],
) -> MappingRecord {
    let mut targets: Vec<_> = cands.iter().map(|c| c.curie.clone()).collect();
    targets.sort();
    targets.dedup();
    let mut evidence: Vec<EvidenceAtom> = cands.iter().flat_map(|c| c.evidence.iter().cloned()).collect();
    canonical_order(&mut evidence);
    let one = targets.len() == 1;
    let category = match (level, one) {
        (Level::Ancestor, true) => MappingCategory::AutoOneToOneAncestor,
        (Level::Ancestor, false) => MappingCategory::AutoOneToManyAncestor,
        (_, true) => MappingCategory::AutoOneToOneConcept,
        (_, false) => MappingCategory::AutoOneToManyConcept,
    };
    MappingRecord {
        concept_id: concept.concept_id,
        domain: concept.domain,
        ontology,
        category,
        level: category.level(),
        logic: Some(Logic::conjunction(targets.len())),
        targets,
        score: None,
        evidence,
        unmapped_reason: None,
        result: None,
    }
}

fn in_ontology(cands: &[CandidateMatch], ontology: Ontology) -> Vec<&CandidateMatch> {
    cands.iter().filter(|c| c.curie.ontology() == ontology).collect()
}

/// Record for a curation row. Exact candidates on the curated targets add
/// their evidence next to the citation.
pub fn from_curation(
    concept: &ClinicalConcept,
    row: &CurationRow,
    exact: &[CandidateMatch],
) -> MappingRecord {
    let mut evidence: Vec<EvidenceAtom> = row
        .evidence
        .iter()
        .map(|e| EvidenceAtom::new(EvidenceKind::ManualSource, e))
        .collect();
    if evidence.is_empty() {
        evidence.push(EvidenceAtom::new(EvidenceKind::ManualSource, "curation"));
    }
    if let Some(reason) = row.unmapped_reason {
        return MappingRecord::unmapped(concept.concept_id, concept.domain, row.ontology, reason, evidence);
    }
    evidence.extend(
        exact
            .iter()
            .filter(|c| row.targets.contains(&c.curie))
            .flat_map(|c| c.evidence.iter().cloned()),
    );
    canonical_order(&mut evidence);
    let category = if row.targets.len() == 1 {
        MappingCategory::ManualOneToOneConcept
    } else {
        MappingCategory::ManualOneToManyConcept
    };
    MappingRecord {
        concept_id: concept.concept_id,
        domain: concept.domain,
        ontology: row.ontology,
        category,
        level: Level::Concept,
        logic: row.logic.clone(),
        targets: row.targets.clone(),
        score: None,
        evidence,
        unmapped_reason: None,
        result: None,
    }
}

/// One record per configured ontology, by precedence: curation, concept-level
/// exact, ancestor-level exact, cosine, unmapped.
///
/// Routing exclusions and routed-away ontologies yield unmapped records
/// unless a curation row overrides them.
pub fn synthesize(input: &ConceptEvidence<'_>) -> Result<Vec<MappingRecord>, SynthError> {
    let concept = input.concept;
    let mut curated: BTreeMap<Ontology, &CurationRow> = BTreeMap::new();
    for row in &input.curation {
        if let Some(prev) = curated.insert(row.ontology, row) {
            return Err(SynthError::ConflictingCuration {
                concept_id: concept.concept_id,
                ontology: row.ontology,
                lines: (prev.line, row.line),
            });
        }
    }
    let all_exact: Vec<CandidateMatch> = input
        .concept_candidates
        .iter()
        .chain(&input.ancestor_candidates)
        .cloned()
        .collect();

    let mut out = Vec::with_capacity(input.ontologies.len());
    for &ontology in input.ontologies {
        let unmapped = |reason| MappingRecord::unmapped(concept.concept_id, concept.domain, ontology, reason, vec![]);
        if let Some(row) = curated.get(&ontology) {
            out.push(from_curation(concept, row, &all_exact));
            continue;
        }
        if let Some(reason) = input.route.exclusion {
            out.push(unmapped(reason));
            continue;
        }
        if !input.route.allowed.contains(&ontology) {
            out.push(unmapped(fallback_reason(concept)));
            continue;
        }
        let concept_level = in_ontology(&input.concept_candidates, ontology);
        if !concept_level.is_empty() {
            out.push(from_candidates(concept, ontology, Level::Concept, &concept_level));
            continue;
        }
        let ancestor_level = in_ontology(&input.ancestor_candidates, ontology);
        if !ancestor_level.is_empty() {
            out.push(from_candidates(concept, ontology, Level::Ancestor, &ancestor_level));
            continue;
        }
        if let Some(best) = input.cosine.get(&ontology) {
            out.push(MappingRecord {
                concept_id: concept.concept_id,
                domain: concept.domain,
                ontology,
                category: MappingCategory::CosineOneToOneConcept,
                level: Level::Concept,
                logic: Some(Logic::conjunction(1)),
                targets: vec![best.curie.clone()],
                score: Some(best.score),
                evidence: vec![EvidenceAtom::new(EvidenceKind::CosineScore, cosine_payload(best))],
                unmapped_reason: None,
                result: None,
            });
            continue;
        }
        out.push(unmapped(fallback_reason(concept)));
    }
    // curation rows for ontologies outside the configured set still count
    for (ontology, row) in &curated {
        if !input.ontologies.contains(ontology) {
            out.push(from_curation(concept, row, &all_exact));
        }
    }
    Ok(out)
}
