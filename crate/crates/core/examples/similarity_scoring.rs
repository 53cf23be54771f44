//! Fits the TF-IDF model over a handful of strings, scores every concept
//! against every class and applies the score floor and keep fraction.
//!
//!     cargo run --example similarity_scoring -- [TAU] [RHO]

use termbridge::lexical::TokenizerConfig;
use termbridge::model::{ConceptId, Curie, StringRole};
use termbridge::similarity::{filter_pairs, score_concept_pairs, Owner, RowMeta, SimilarityConfig, SimilarityModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<f64>());
    let tau = args.next().transpose()?.unwrap_or(0.25);
    let rho = args.next().transpose()?.unwrap_or(0.75);
    let cfg = SimilarityConfig::new(tau, rho)?;

    let concepts = [
        (4147326, "Sore throat symptom"),
        (4147326, "Sore throat"),
        (254761, "Persistent cough"),
        (437663, "Fever symptom"),
        (77670, "Chest pain"),
    ];
    let classes = [
        ("HP:0033050", "Throat pain"),
        ("HP:0012735", "Cough"),
        ("HP:0031246", "Nonproductive cough"),
        ("HP:0001945", "Fever"),
        ("HP:0001945", "Pyrexia"),
        ("HP:0012531", "Pain"),
        ("HP:0100749", "Chest pain"),
    ];
    let mut docs = Vec::new();
    for (id, text) in concepts {
        docs.push(RowMeta { owner: Owner::Clinical(ConceptId::new(id)?), role: StringRole::Label, text: text.into() });
    }
    for (curie, text) in classes {
        docs.push(RowMeta { owner: Owner::Ontology(Curie::parse(curie)?), role: StringRole::Label, text: text.into() });
    }
    let model = SimilarityModel::fit(docs, &TokenizerConfig::for_similarity())?;
    println!("vocabulary: {}", model.vocabulary().join(" "));

    let pairs = score_concept_pairs(&model, |_, _| true, 0.0);
    let kept = filter_pairs(pairs.clone(), &cfg);
    println!("{} scored pairs, {} kept at tau={tau} rho={rho}", pairs.len(), kept.len());
    for p in &pairs {
        let mark = if kept.contains(p) { "*" } else { " " };
        println!(
            "{mark} {:>8} {:<11} {:.4}  {:?} ~ {:?}",
            p.concept_id,
            p.curie,
            p.score,
            model.meta(p.concept_row as usize).text,
            model.meta(p.class_row as usize).text
        );
    }
    Ok(())
}
