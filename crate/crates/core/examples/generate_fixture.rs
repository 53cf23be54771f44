//! Writes a seeded synthetic corpus to a directory, ready for `termbridge map`.
//!
//!     cargo run --example generate_fixture -- OUT_DIR [CONCEPTS] [CLASSES] [SEED]

use std::path::PathBuf;

use termbridge::synthetic::{generate, SyntheticSpec, FILES};

fn main() -> std::io::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "synthetic".into()));
    let mut num = |default: u64| args.next().map_or(default, |s| s.parse().expect("numeric argument"));
    let (concepts, classes, seed) = (num(10_000), num(50_000), num(42));
    std::fs::create_dir_all(&out)?;
    let corpus = generate(&SyntheticSpec::new(seed, concepts as usize, classes as usize));
    corpus.write_to(&out)?;
    println!("wrote {} concepts, {} classes to {}", corpus.concepts.len(), corpus.classes.len(), out.display());
    println!("files: {}", FILES.join(", "));
    println!(
        "map with: termbridge map --concepts {d}/concepts.tsv --ancestors {d}/concept_ancestors.tsv \
         --ontology {d}/ontology.jsonl --class-ancestors {d}/class_ancestors.tsv \
         --umls-mrconso {d}/MRCONSO.RRF --umls-mrsty {d}/MRSTY.RRF --routing {d}/routing.tsv \
         --curation {d}/curation.tsv --out OUT",
        d = out.display()
    );
    Ok(())
}
