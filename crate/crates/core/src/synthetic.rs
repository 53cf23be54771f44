//! Seeded synthetic corpora for scale tests, oracles and examples.
//!
//! Strings are built from a fixed pseudo-word vocabulary so that token
//! overlap, exact string hits and shared codes all occur at controllable
//! rates. The same seed always yields the same corpus.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::{
    write_class_ancestors, write_concept_ancestors, write_concepts, write_curation, write_ontology_dump, ConceptSet,
    CurationRow, OntologySet, UmlsIndex,
};
use crate::model::{
    ClinicalConcept, CodeRef, ConceptId, Cui, Curie, Domain, Logic, Ontology, OntologyClass, Synonym, SynonymKind,
    UnmappedReason,
};

const SYLLABLES: [&str; 20] = [
    "ba", "ke", "li", "mo", "nu", "ra", "se", "ti", "vo", "zu", "da", "fe", "gi", "ho", "ju", "pa", "qe", "wi",
    "xo", "yu",
];

const SEMANTIC_TYPES: [&str; 5] = [
    "Disease or Syndrome",
    "Sign or Symptom",
    "Congenital Abnormality",
    "Finding",
    "Injury or Poisoning",
];

/// Size and mixing rates of a synthetic corpus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub concepts: usize,
    pub classes: usize,
    /// Distinct pseudo-words; at most 8000.
    pub vocabulary: usize,
    /// Share of concepts whose label copies a class string.
    pub exact_string_rate: f64,
    /// Share of concepts whose code is a class xref.
    pub shared_code_rate: f64,
    /// Share of concepts bridged to a CUI.
    pub cui_rate: f64,
    /// Share of concepts with a curation row.
    pub curation_rate: f64,
}

impl SyntheticSpec {
    pub fn new(seed: u64, concepts: usize, classes: usize) -> Self {
        Self {
            seed,
            concepts,
            classes,
            vocabulary: 8000,
            exact_string_rate: 0.2,
            shared_code_rate: 0.15,
            cui_rate: 0.3,
            curation_rate: 0.01,
        }
    }
}

/// A generated corpus with UMLS atoms already attached to the concepts.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub concepts: ConceptSet,
    pub classes: OntologySet,
    pub umls: UmlsIndex,
    pub curation: Vec<CurationRow>,
    /// `semantic_type, action, value` rows.
    pub routing: Vec<(String, String, String)>,
}

/// The `i`-th pseudo-word (three syllables).
pub fn pseudo_word(i: usize) -> String {
    let n = SYLLABLES.len();
    format!("{}{}{}", SYLLABLES[i / (n * n) % n], SYLLABLES[i / n % n], SYLLABLES[i % n])
}

fn phrase(rng: &mut ChaCha8Rng, words: &[String], len: usize) -> String {
    (0..len).map(|_| words.choose(rng).expect("non-empty vocabulary").as_str()).collect::<Vec<_>>().join(" ")
}

fn cui(n: usize) -> Cui {
    Cui::parse(&format!("C{:07}", n)).expect("well-formed CUI")
}

pub fn generate(spec: &SyntheticSpec) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let vocab = spec.vocabulary.clamp(1, SYLLABLES.len().pow(3));
    let words: Vec<String> = (0..vocab).map(pseudo_word).collect();

    let mut classes = OntologySet::new();
    let mut class_list: Vec<(Curie, String, Option<CodeRef>, Option<Cui>)> = Vec::with_capacity(spec.classes);
    let mut umls = UmlsIndex::new();
    let mut next_cui = 1usize;
    for k in 0..spec.classes {
        let ontology = if k % 2 == 0 { Ontology::Hp } else { Ontology::Mondo };
        let curie = Curie::parse(&format!("{}:{:07}", ontology.curie_prefix(), k + 1)).expect("well-formed CURIE");
        let len = rng.gen_range(2..=4);
        let label = phrase(&mut rng, &words, len);
        let synonyms = (0..rng.gen_range(0..=2))
            .map(|_| {
                let len = rng.gen_range(2..=4);
                Synonym { text: phrase(&mut rng, &words, len), kind: SynonymKind::Exact }
            })
            .collect();
        let mut xrefs = Vec::new();
        let code = rng.gen_bool(0.3).then(|| CodeRef::new("SNOMED", format!("{}", 9_000_000 + k)).expect("code"));
        xrefs.extend(code.clone());
        let class_cui = rng.gen_bool(0.2).then(|| {
            let c = cui(next_cui);
            next_cui += 1;
            c
        });
        if let Some(c) = &class_cui {
            xrefs.push(CodeRef::new("UMLS", c.as_str()).expect("code"));
        }
        xrefs.sort();
        let ancestors = if k >= 2 && rng.gen_bool(0.5) {
            vec![class_list[rng.gen_range(0..k)].0.clone()]
        } else {
            Vec::new()
        };
        classes
            .insert(OntologyClass {
                curie: curie.clone(),
                ontology,
                label: label.clone(),
                definition: None,
                synonyms,
                xrefs,
                ancestors,
                deprecated: rng.gen_bool(0.01),
            })
            .expect("unique CURIE");
        class_list.push((curie, label, code, class_cui));
    }

    let mut concepts = ConceptSet::new();
    let mut curation = Vec::new();
    for j in 0..spec.concepts {
        let concept_id = ConceptId::new(1_000_000 + j as u64).expect("positive id");
        let donor = (!class_list.is_empty()).then(|| &class_list[rng.gen_range(0..class_list.len())]);
        let label = match donor {
            Some(d) if rng.gen_bool(spec.exact_string_rate) => d.1.clone(),
            Some(d) if rng.gen_bool(0.5) => {
                let extra = rng.gen_range(1..=2);
                format!("{} {}", d.1.split(' ').next().unwrap_or(""), phrase(&mut rng, &words, extra))
            }
            _ => {
                let len = rng.gen_range(2..=5);
                phrase(&mut rng, &words, len)
            }
        };
        let code = match donor.and_then(|d| d.2.clone()) {
            Some(c) if rng.gen_bool(spec.shared_code_rate) => c,
            _ => CodeRef::new("SNOMED", format!("{}", 100_000 + j)).expect("code"),
        };
        let synonyms = (0..rng.gen_range(0..=2))
            .map(|_| {
                let len = rng.gen_range(2..=4);
                phrase(&mut rng, &words, len)
            })
            .collect();
        let ancestors = if j >= 2 && rng.gen_bool(0.4) {
            let mut a: Vec<ConceptId> = (0..rng.gen_range(1..=2))
                .map(|_| ConceptId::new(1_000_000 + rng.gen_range(0..j) as u64).expect("positive id"))
                .collect();
            a.sort_unstable();
            a.dedup();
            a
        } else {
            Vec::new()
        };
        if rng.gen_bool(spec.cui_rate) {
            let c = match donor.and_then(|d| d.3.clone()) {
                Some(c) if rng.gen_bool(0.5) => c,
                _ => {
                    next_cui += 1;
                    cui(next_cui)
                }
            };
            umls.add_atom(code.clone(), c.clone());
            let sty = if rng.gen_bool(0.05) { SEMANTIC_TYPES[4] } else { SEMANTIC_TYPES[rng.gen_range(0..4)] };
            umls.add_semantic_type(c, sty);
        }
        if let Some(d) = donor.filter(|_| rng.gen_bool(spec.curation_rate)) {
            curation.push(CurationRow {
                line: curation.len() as u64 + 2,
                concept_id,
                ontology: d.0.ontology(),
                logic: Some(Logic::conjunction(1)),
                targets: vec![d.0.clone()],
                evidence: vec![format!("PMID:{}", 30_000_000 + j)],
                unmapped_reason: None,
            });
        } else if rng.gen_bool(spec.curation_rate / 2.0) {
            curation.push(CurationRow {
                line: curation.len() as u64 + 2,
                concept_id,
                ontology: Ontology::Mondo,
                logic: None,
                targets: Vec::new(),
                evidence: Vec::new(),
                unmapped_reason: Some(UnmappedReason::Finding),
            });
        }
        concepts
            .insert(ClinicalConcept {
                concept_id,
                vocabulary: code.prefix().to_string(),
                code,
                label,
                synonyms,
                domain: Domain::Condition,
                used_in_practice: rng.gen_bool(0.6),
                record_count: rng.gen_range(0..100_000),
                ancestors,
                semantic_types: BTreeSet::new(),
                cuis: BTreeSet::new(),
            })
            .expect("unique id");
    }
    crate::align::attach_umls(&mut concepts, &umls);
    SyntheticCorpus {
        concepts,
        classes,
        umls,
        curation,
        routing: vec![("Injury or Poisoning".into(), "EXCLUDE".into(), "INJURY".into())],
    }
}

/// Pipe-delimited MRCONSO line with only the fields the loader reads filled in.
fn mrconso_line(cui: &Cui, sab: &str, code: &str, text: &str) -> String {
    let mut f = vec![""; 18];
    f[0] = cui.as_str();
    f[1] = "ENG";
    f[11] = sab;
    f[13] = code;
    f[14] = text;
    format!("{}|", f.join("|"))
}

/// Input file names written by [`SyntheticCorpus::write_to`].
pub const FILES: [&str; 8] = [
    "concepts.tsv",
    "concept_ancestors.tsv",
    "ontology.jsonl",
    "class_ancestors.tsv",
    "MRCONSO.RRF",
    "MRSTY.RRF",
    "routing.tsv",
    "curation.tsv",
];

impl SyntheticCorpus {
    /// Writes every input file into `dir` (which must exist).
    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        let create = |name: &str| File::create(dir.join(name)).map(BufWriter::new);
        write_concepts(create(FILES[0])?, &self.concepts)?;
        write_concept_ancestors(create(FILES[1])?, &self.concepts)?;
        write_ontology_dump(create(FILES[2])?, &self.classes)?;
        write_class_ancestors(create(FILES[3])?, &self.classes)?;

        let mut conso = create(FILES[4])?;
        let mut sty = create(FILES[5])?;
        let mut seen: BTreeMap<&Cui, ()> = BTreeMap::new();
        for c in self.concepts.iter() {
            for cui in &c.cuis {
                writeln!(conso, "{}", mrconso_line(cui, "SNOMEDCT_US", c.code.code(), &c.label))?;
                if seen.insert(cui, ()).is_none() {
                    for s in self.umls.semantic_types(cui) {
                        writeln!(sty, "{}|T000|A0|{s}|AT0|256|", cui.as_str())?;
                    }
                }
            }
        }
        conso.flush()?;
        sty.flush()?;

        let mut routing = create(FILES[6])?;
        writeln!(routing, "semantic_type\taction\tvalue")?;
        for (s, a, v) in &self.routing {
            writeln!(routing, "{s}\t{a}\t{v}")?;
        }
        routing.flush()?;
        write_curation(create(FILES[7])?, &self.curation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_corpus() {
        let spec = SyntheticSpec::new(7, 200, 300);
        let (a, b) = (generate(&spec), generate(&spec));
        assert_eq!(a.concepts, b.concepts);
        assert_eq!(a.classes, b.classes);
        assert_eq!(a.curation, b.curation);
        assert_ne!(generate(&SyntheticSpec::new(8, 200, 300)).concepts, a.concepts);
    }

    #[test]
    fn words_are_distinct() {
        let words: BTreeSet<String> = (0..8000).map(pseudo_word).collect();
        assert_eq!(words.len(), 8000);
    }

    #[test]
    fn rates_produce_hits() {
        let c = generate(&SyntheticSpec::new(1, 500, 500));
        assert!(c.concepts.iter().any(|x| !x.cuis.is_empty()));
        assert!(c.concepts.iter().any(|x| !x.ancestors.is_empty()));
        assert!(!c.curation.is_empty());
    }
}
