//! Expands lab tests into one phenotype mapping per interpretable result.
//! Normal results of a Low/High test map to the negated abnormality class.
//!
//!     cargo run --example measurement_expansion

use std::path::{Path, PathBuf};

use termbridge::ingest::{load_concepts, load_measurement_scales, load_measurement_targets, load_ontology_dump};
use termbridge::lexical::NormalizationDictionary;
use termbridge::pipeline::{run_mapping, MappingInputs};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/measurement").join(name)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dict = NormalizationDictionary::builtin();
    let (concepts, _) = load_concepts(&fixture("concepts.tsv"), None, None, &dict)?;
    let (mut classes, _) = load_ontology_dump(&fixture("hp.jsonl"), None, &dict)?;
    for dump in ["uberon.jsonl", "chebi.jsonl"] {
        let (more, _) = load_ontology_dump(&fixture(dump), None, &dict)?;
        classes.extend(more).map_err(|c| format!("duplicate class {c}"))?;
    }
    let mut inputs = MappingInputs::new(concepts, classes);
    inputs.measurement_scales = load_measurement_scales(&fixture("measurement_scales.tsv"))?;
    inputs.measurement_targets = load_measurement_targets(&fixture("measurement_targets.tsv"))?;
    let run = run_mapping(&inputs)?;

    for spec in &run.measurement_specs {
        let c = inputs.concepts.get(spec.concept_id).expect("loaded concept");
        println!("{} {} ({}, {})", c.code, c.label, spec.scale, spec.result_type);
        for (outcome, target) in &spec.assignments {
            let label = inputs.classes.label(&target.curie).unwrap_or("?");
            let not = if target.negated { "NOT " } else { "" };
            println!("    {outcome:<8} -> {not}{} {label}", target.curie);
        }
    }
    let excluded = run.records.iter().filter(|r| r.unmapped_reason.is_some_and(|x| x.code() == "UNSPECIFIED_SAMPLE"));
    for r in excluded {
        println!("{} {}: excluded, unspecified sample", r.concept_id, r.ontology.key());
    }
    Ok(())
}
