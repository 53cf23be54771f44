//! End-to-end mapping run over loaded inputs.

use std::collections::{BTreeMap, BTreeSet};

use log::{info, warn};
use rayon::prelude::*;

use crate::align::{align_concept, align_via_ancestors, AlignmentIndexes};
use crate::ingest::{ConceptSet, CurationRow, MeasurementScaleRow, MeasurementTargets, OntologySet};
use crate::lexical::TokenizerConfig;
use crate::model::{
    validate_record, ConceptId, Domain, MappingRecord, MeasurementResultSpec, Ontology,
};
use crate::similarity::{
    best_per_concept, filter_per_ontology, score_concept_pairs, RowMeta, Owner, SimilarityConfig,
    SimilarityError, SimilarityModel,
};
use crate::synth::{
    expand_measurements, synthesize, ConceptEvidence, CosineBest, RoutingPolicy, SynthError,
};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error("INVALID_RECORD: concept {concept_id} ontology {ontology}: {kind} at {path}")]
    InvalidRecord {
        concept_id: ConceptId,
        ontology: &'static str,
        kind: &'static str,
        path: String,
    },
}

impl PipelineError {
    pub fn code(&self) -> &'static str {
        match self {
            PipelineError::Synth(e) => e.code(),
            PipelineError::Similarity(SimilarityError::EmptyCorpus) => "EMPTY_CORPUS",
            PipelineError::Similarity(_) => "BAD_CONFIG",
            PipelineError::InvalidRecord { .. } => "INVALID_RECORD",
        }
    }
}

/// Everything a mapping run reads.
#[derive(Debug, Clone)]
pub struct MappingInputs {
    pub concepts: ConceptSet,
    pub classes: OntologySet,
    pub routing: RoutingPolicy,
    pub curation: Vec<CurationRow>,
    pub measurement_scales: BTreeMap<ConceptId, MeasurementScaleRow>,
    pub measurement_targets: MeasurementTargets,
    /// Target ontologies per domain, in output order.
    pub ontologies: BTreeMap<Domain, Vec<Ontology>>,
    pub similarity: SimilarityConfig,
    pub tokenizer: TokenizerConfig,
}

impl MappingInputs {
    /// Inputs with default routing, no curation, default ontologies per domain.
    pub fn new(concepts: ConceptSet, classes: OntologySet) -> Self {
        Self {
            concepts,
            classes,
            routing: RoutingPolicy::new(),
            curation: Vec::new(),
            measurement_scales: BTreeMap::new(),
            measurement_targets: MeasurementTargets::default(),
            ontologies: Domain::ALL
                .iter()
                .map(|&d| (d, Ontology::defaults_for(d).to_vec()))
                .collect(),
            similarity: SimilarityConfig::default(),
            tokenizer: TokenizerConfig::for_similarity(),
        }
    }

    pub fn ontologies_for(&self, domain: Domain) -> &[Ontology] {
        self.ontologies.get(&domain).map_or(&[], Vec::as_slice)
    }
}

/// Output of a mapping run.
#[derive(Debug, Clone, Default)]
pub struct MappingRun {
    /// Sorted by (concept id, ontology, result outcome).
    pub records: Vec<MappingRecord>,
    pub measurement_specs: Vec<MeasurementResultSpec>,
    pub warnings: Vec<String>,
}

/// Cosine winners per (concept, ontology), computed per domain.
fn cosine_winners(inputs: &MappingInputs) -> Result<BTreeMap<(ConceptId, Ontology), CosineBest>, PipelineError> {
    let mut winners = BTreeMap::new();
    for domain in Domain::ALL {
        let targets: BTreeSet<Ontology> = inputs.ontologies_for(domain).iter().copied().collect();
        let mut docs: Vec<RowMeta> = Vec::new();
        let mut routes = BTreeMap::new();
        for c in inputs.concepts.iter().filter(|c| c.domain == domain) {
            routes.insert(c.concept_id, inputs.routing.route(c, inputs.ontologies_for(domain)));
            for (text, role) in c.strings() {
                docs.push(RowMeta { owner: Owner::Clinical(c.concept_id), role, text: text.to_string() });
            }
        }
        if docs.is_empty() {
            continue;
        }
        for k in inputs.classes.active().filter(|k| targets.contains(&k.ontology)) {
            for (text, role) in k.strings() {
                docs.push(RowMeta { owner: Owner::Ontology(k.curie.clone()), role, text: text.to_string() });
            }
        }
        let model = SimilarityModel::fit(docs, &inputs.tokenizer)?;
        info!(
            "similarity {}: {} rows, {} tokens",
            domain.as_str(),
            model.rows(),
            model.vocabulary().len()
        );
        let pairs = score_concept_pairs(
            &model,
            |id, o| routes.get(&id).is_some_and(|r| r.permits(o)),
            inputs.similarity.tau,
        );
        let scored = pairs.len();
        let kept = filter_per_ontology(pairs, &inputs.similarity);
        info!("similarity {}: {} pairs >= tau, {} kept", domain.as_str(), scored, kept.len());
        for (key, p) in best_per_concept(&kept) {
            winners.insert(
                key,
                CosineBest {
                    curie: p.curie.clone(),
                    score: p.score,
                    concept_text: model.meta(p.concept_row as usize).text.clone(),
                    class_text: model.meta(p.class_row as usize).text.clone(),
                },
            );
        }
    }
    Ok(winners)
}

fn result_order(r: &MappingRecord) -> (ConceptId, Ontology, Option<crate::model::Outcome>) {
    (r.concept_id, r.ontology, r.result)
}

/// Runs alignment, similarity, synthesis and measurement expansion on the
/// current rayon pool. Output is independent of the pool size.
pub fn run_mapping(inputs: &MappingInputs) -> Result<MappingRun, PipelineError> {
    let mut warnings = Vec::new();
    let mut curation: BTreeMap<ConceptId, Vec<&CurationRow>> = BTreeMap::new();
    for row in &inputs.curation {
        if !inputs.concepts.contains(row.concept_id) {
            warnings.push(format!("curation line {}: concept {} not loaded", row.line, row.concept_id));
            continue;
        }
        for t in &row.targets {
            if inputs.classes.get(t).is_none() {
                warnings.push(format!("curation line {}: unknown target {t}", row.line));
            }
        }
        curation.entry(row.concept_id).or_default().push(row);
    }

    let ix = AlignmentIndexes::build(&inputs.classes);
    info!(
        "indexes: {} classes, {} strings, {} codes, {} cuis",
        ix.class_count(),
        ix.string_keys(),
        ix.code_keys(),
        ix.cui_keys()
    );
    let cosine = cosine_winners(inputs)?;

    let concepts: Vec<_> = inputs.concepts.iter().collect();
    let per_concept: Vec<(Vec<MappingRecord>, Option<MeasurementResultSpec>)> = concepts
        .par_iter()
        .map(|&concept| -> Result<_, PipelineError> {
            let ontologies = inputs.ontologies_for(concept.domain);
            let route = inputs.routing.route(concept, ontologies);
            let allowed: BTreeSet<Ontology> = if route.exclusion.is_some() {
                BTreeSet::new()
            } else {
                route.allowed.clone()
            };
            let concept_candidates = align_concept(concept, &ix, &allowed);
            let hit: BTreeSet<Ontology> = concept_candidates.iter().map(|c| c.curie.ontology()).collect();
            let fallback: BTreeSet<Ontology> = allowed.difference(&hit).copied().collect();
            let ancestor_candidates =
                align_via_ancestors(concept, inputs.concepts.ancestors_of(concept), &ix, &fallback);
            let evidence = ConceptEvidence {
                concept,
                ontologies,
                route,
                concept_candidates,
                ancestor_candidates,
                cosine: ontologies
                    .iter()
                    .filter_map(|&o| cosine.get(&(concept.concept_id, o)).map(|b| (o, b.clone())))
                    .collect(),
                curation: curation.get(&concept.concept_id).cloned().unwrap_or_default(),
            };
            let mut records = synthesize(&evidence)?;
            let mut spec = None;
            if concept.domain == Domain::Measurement {
                let x = expand_measurements(
                    concept,
                    inputs.measurement_scales.get(&concept.concept_id),
                    inputs.measurement_targets.results.get(&concept.concept_id),
                    inputs.measurement_targets.auxiliary.get(&concept.concept_id),
                )?;
                let curated: BTreeSet<Ontology> = evidence.curation.iter().map(|r| r.ontology).collect();
                if let Some(reason) = x.exclusion {
                    for r in records.iter_mut().filter(|r| !curated.contains(&r.ontology)) {
                        *r = MappingRecord::unmapped(r.concept_id, r.domain, r.ontology, reason, vec![]);
                    }
                }
                for aux in x.auxiliary_records {
                    if curated.contains(&aux.ontology) {
                        continue;
                    }
                    match records.iter_mut().find(|r| r.ontology == aux.ontology && r.result.is_none()) {
                        Some(slot) => *slot = aux,
                        None => records.push(aux),
                    }
                }
                records.extend(x.result_records);
                spec = Some(x.spec);
            }
            for r in &records {
                if let Err(v) = validate_record(r) {
                    return Err(PipelineError::InvalidRecord {
                        concept_id: r.concept_id,
                        ontology: r.ontology.key(),
                        kind: v.kind.as_str(),
                        path: v.path,
                    });
                }
            }
            Ok((records, spec))
        })
        .collect::<Result<_, _>>()?;

    let mut run = MappingRun { warnings, ..Default::default() };
    for (records, spec) in per_concept {
        run.records.extend(records);
        run.measurement_specs.extend(spec);
    }
    run.records.sort_by_key(result_order);
    for w in &run.warnings {
        warn!("{w}");
    }
    Ok(run)
}

/// Runs [`run_mapping`] on a dedicated pool of `jobs` workers.
pub fn run_mapping_with_jobs(inputs: &MappingInputs, jobs: usize) -> Result<MappingRun, PipelineError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("worker pool");
    pool.install(|| run_mapping(inputs))
}
