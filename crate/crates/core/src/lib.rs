//! Batch alignment of clinical vocabulary concepts to OBO Foundry ontology
//! classes.
//!
//! A run loads concepts, ontology dumps and optional UMLS tables, finds exact
//! matches on normalized strings, shared codes and shared CUIs (falling back
//! to concept ancestors), scores the rest with TF-IDF cosine similarity and
//! folds everything into one categorized [`model::MappingRecord`] per concept
//! and target ontology. Manual curation, semantic-type routing and lab-result
//! expansion are applied on the way. The [`eval`] module measures coverage
//! against site usage and compares phenotype risk scores between cohorts.
//!
//! ```no_run
//! use termbridge::ingest::{load_concepts, load_ontology_dump};
//! use termbridge::lexical::NormalizationDictionary;
//! use termbridge::pipeline::{run_mapping, MappingInputs};
//!
//! let dict = NormalizationDictionary::builtin();
//! let (concepts, _) = load_concepts("concepts.tsv".as_ref(), None, None, &dict)?;
//! let (classes, _) = load_ontology_dump("hp.jsonl".as_ref(), None, &dict)?;
//! let run = run_mapping(&MappingInputs::new(concepts, classes))?;
//! println!("{} records", run.records.len());
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod align;
pub mod cli;
pub mod eval;
pub mod ingest;
pub mod lexical;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod similarity;
pub mod synthetic;
pub mod synth;
