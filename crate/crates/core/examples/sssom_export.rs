//! Maps the worked-example fixture and prints it as SSSOM-style TSV, one
//! row per target class.
//!
//!     cargo run --example sssom_export

use std::path::{Path, PathBuf};

use termbridge::align::attach_umls;
use termbridge::ingest::{load_concepts, load_curation, load_ontology_dump, load_routing_policy, load_umls};
use termbridge::lexical::NormalizationDictionary;
use termbridge::pipeline::{run_mapping, MappingInputs};
use termbridge::report::write_sssom;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/worked").join(name)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dict = NormalizationDictionary::builtin();
    let (mut concepts, _) = load_concepts(&fixture("concepts.tsv"), Some(&fixture("concept_ancestors.tsv")), None, &dict)?;
    let (mut classes, _) = load_ontology_dump(&fixture("hp.jsonl"), None, &dict)?;
    let (mondo, _) = load_ontology_dump(&fixture("mondo.jsonl"), None, &dict)?;
    classes.extend(mondo).map_err(|c| format!("duplicate class {c}"))?;
    attach_umls(&mut concepts, &load_umls(&fixture("MRCONSO.RRF"), Some(&fixture("MRSTY.RRF")), &dict, None)?);

    let mut inputs = MappingInputs::new(concepts, classes);
    inputs.routing = load_routing_policy(&fixture("routing.tsv"))?;
    inputs.curation = load_curation(&fixture("curation.tsv"))?;
    let run = run_mapping(&inputs)?;

    let stdout = std::io::stdout();
    let rows = write_sssom(&mut stdout.lock(), &run.records, Some(&inputs.concepts), Some(&inputs.classes))?;
    eprintln!("{rows} rows from {} records", run.records.len());
    Ok(())
}
