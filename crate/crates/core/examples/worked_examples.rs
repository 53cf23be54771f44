//! Maps the bundled worked-example fixture (conditions to HP and MONDO) and
//! prints one line per (concept, ontology) decision.
//!
//!     cargo run --example worked_examples

use std::path::{Path, PathBuf};

use termbridge::align::attach_umls;
use termbridge::ingest::{load_concepts, load_curation, load_ontology_dump, load_routing_policy, load_umls};
use termbridge::lexical::NormalizationDictionary;
use termbridge::pipeline::{run_mapping, MappingInputs};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/worked").join(name)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dict = NormalizationDictionary::builtin();
    let (mut concepts, _) = load_concepts(&fixture("concepts.tsv"), Some(&fixture("concept_ancestors.tsv")), None, &dict)?;
    let (mut classes, _) = load_ontology_dump(&fixture("hp.jsonl"), None, &dict)?;
    let (mondo, _) = load_ontology_dump(&fixture("mondo.jsonl"), None, &dict)?;
    classes.extend(mondo).map_err(|c| format!("duplicate class {c}"))?;
    let umls = load_umls(&fixture("MRCONSO.RRF"), Some(&fixture("MRSTY.RRF")), &dict, None)?;
    attach_umls(&mut concepts, &umls);

    let mut inputs = MappingInputs::new(concepts, classes);
    inputs.routing = load_routing_policy(&fixture("routing.tsv"))?;
    inputs.curation = load_curation(&fixture("curation.tsv"))?;
    let run = run_mapping(&inputs)?;

    for r in &run.records {
        let label = &inputs.concepts.get(r.concept_id).expect("loaded concept").label;
        let what = match r.unmapped_reason {
            Some(reason) => format!("unmapped: {}", reason.display()),
            None => {
                let targets: Vec<String> = r.targets.iter().map(ToString::to_string).collect();
                let logic = r.logic.as_ref().map(ToString::to_string).unwrap_or_default();
                format!("{} {} [{}]", r.category.display(), logic, targets.join(", "))
            }
        };
        println!("{:>8} {:<40} {:<5} {what}", r.concept_id, label, r.ontology.key());
        if r.is_mapped() {
            println!("{:>8} evidence: {}", "", r.evidence_string());
        }
    }
    Ok(())
}
