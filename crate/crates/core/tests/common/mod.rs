//! Independent reference implementations and fixture helpers shared by the
//! integration tests. Nothing here calls the code it checks, apart from
//! tokenization, which is an input to the similarity oracle and not the
//! thing being checked.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use statrs::function::erf::erfc;
use termbridge::ingest::{ConceptSet, OntologySet};
use termbridge::lexical::normalize_string;
use termbridge::model::{ConceptId, Cui, Curie};

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_termbridge")
}

pub fn fixture(parts: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(parts)
}

pub fn run_cli<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(bin())
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("spawn termbridge")
}

/// `map` arguments for the worked-example fixture.
pub fn worked_map_args(out: &Path) -> Vec<String> {
    let f = |n: &str| fixture(&format!("worked/{n}")).display().to_string();
    vec![
        "map".into(),
        "--concepts".into(),
        f("concepts.tsv"),
        "--ancestors".into(),
        f("concept_ancestors.tsv"),
        "--ontology".into(),
        f("hp.jsonl"),
        "--ontology".into(),
        f("mondo.jsonl"),
        "--umls-mrconso".into(),
        f("MRCONSO.RRF"),
        "--umls-mrsty".into(),
        f("MRSTY.RRF"),
        "--routing".into(),
        f("routing.tsv"),
        "--curation".into(),
        f("curation.tsv"),
        "--out".into(),
        out.display().to_string(),
    ]
}

/// `map` arguments for the measurement fixture.
pub fn measurement_map_args(out: &Path) -> Vec<String> {
    let f = |n: &str| fixture(&format!("measurement/{n}")).display().to_string();
    let mut args = vec!["map".into(), "--concepts".into(), f("concepts.tsv")];
    for o in ["hp.jsonl", "uberon.jsonl", "chebi.jsonl"] {
        args.push("--ontology".into());
        args.push(f(o));
    }
    args.extend([
        "--measurement-scales".into(),
        f("measurement_scales.tsv"),
        "--measurement-targets".into(),
        f("measurement_targets.tsv"),
        "--out".into(),
        out.display().to_string(),
    ]);
    args
}

// ---------------------------------------------------------------------------
// TF-IDF

/// Dense TF-IDF rows: raw counts times `ln((1+N)/(1+df)) + 1`, L2-normalized.
pub struct DenseTfidf {
    pub vocabulary: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl DenseTfidf {
    pub fn fit(docs: &[Vec<String>]) -> Self {
        let mut vocabulary: Vec<String> = docs.iter().flatten().cloned().collect();
        vocabulary.sort();
        vocabulary.dedup();
        let n = docs.len() as f64;
        let idf: Vec<f64> = vocabulary
            .iter()
            .map(|t| {
                let df = docs.iter().filter(|d| d.contains(t)).count() as f64;
                ((1.0 + n) / (1.0 + df)).ln() + 1.0
            })
            .collect();
        let rows = docs
            .iter()
            .map(|d| {
                let mut v: Vec<f64> = vocabulary
                    .iter()
                    .zip(&idf)
                    .map(|(t, w)| d.iter().filter(|x| *x == t).count() as f64 * w)
                    .collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 0.0 {
                    v.iter_mut().for_each(|x| *x /= norm);
                }
                v
            })
            .collect();
        DenseTfidf { vocabulary, rows }
    }

    pub fn cosine(&self, a: usize, b: usize) -> f64 {
        self.rows[a].iter().zip(&self.rows[b]).map(|(x, y)| x * y).sum()
    }

    pub fn norm(&self, a: usize) -> f64 {
        self.rows[a].iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

// ---------------------------------------------------------------------------
// Exact alignment, one channel at a time

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Channel {
    String,
    Code,
    Cui,
}

/// Every (concept, class) pair per channel, by comparing every concept with
/// every non-deprecated class.
pub fn nested_loop_alignment(
    concepts: &ConceptSet,
    classes: &OntologySet,
) -> BTreeMap<Channel, BTreeSet<(ConceptId, Curie)>> {
    let mut out: BTreeMap<Channel, BTreeSet<(ConceptId, Curie)>> = BTreeMap::new();
    let class_strings: Vec<_> = classes
        .iter()
        .filter(|k| !k.deprecated)
        .map(|k| {
            let mut s: Vec<String> = vec![normalize_string(&k.label)];
            s.extend(k.synonyms.iter().map(|x| normalize_string(&x.text)));
            s.extend(k.definition.iter().map(|d| normalize_string(d)));
            s.retain(|x| !x.is_empty());
            let cuis: BTreeSet<String> = k
                .xrefs
                .iter()
                .filter(|x| x.prefix() == "UMLS")
                .map(|x| x.code().to_string())
                .collect();
            (k, s, cuis)
        })
        .collect();
    for c in concepts.iter() {
        let mut own = vec![normalize_string(&c.label)];
        own.extend(c.synonyms.iter().map(|s| normalize_string(s)));
        own.retain(|x| !x.is_empty());
        let cuis: BTreeSet<&str> = c.cuis.iter().map(Cui::as_str).collect();
        for (k, strings, kcuis) in &class_strings {
            if own.iter().any(|a| strings.iter().any(|b| a == b)) {
                out.entry(Channel::String).or_default().insert((c.concept_id, k.curie.clone()));
            }
            if k.xrefs.iter().any(|x| x.prefix() != "UMLS" && *x == c.code) {
                out.entry(Channel::Code).or_default().insert((c.concept_id, k.curie.clone()));
            }
            if kcuis.iter().any(|x| cuis.contains(x.as_str())) {
                out.entry(Channel::Cui).or_default().insert((c.concept_id, k.curie.clone()));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Upper regularized incomplete gamma, closed forms

/// `Q(a, x)` for `a` a positive multiple of 1/2, from the finite sums
/// `Q(k, x) = e^-x Σ_{i<k} x^i / i!` and
/// `Q(k + 1/2, x) = erfc(√x) + e^-x Σ_{i<k} x^(i+1/2) / Γ(i + 3/2)`.
pub fn gamma_q_closed(a: f64, x: f64) -> f64 {
    let twice = (2.0 * a).round() as u64;
    assert!(twice >= 1 && (2.0 * a - twice as f64).abs() < 1e-12);
    if twice.is_multiple_of(2) {
        let k = twice / 2;
        let mut term = 1.0;
        let mut sum = 0.0;
        for i in 0..k {
            if i > 0 {
                term *= x / i as f64;
            }
            sum += term;
        }
        (-x).exp() * sum
    } else {
        let k = twice / 2;
        let mut term = x.sqrt() / (std::f64::consts::PI.sqrt() / 2.0);
        let mut sum = 0.0;
        for i in 0..k {
            if i > 0 {
                term *= x / (i as f64 + 0.5);
            }
            sum += term;
        }
        erfc(x.sqrt()) + (-x).exp() * sum
    }
}

/// Yates-corrected 2×2 statistic `N (|ad − bc| − N/2)² / (r1 r2 c1 c2)`,
/// zero when `|ad − bc| < N/2`.
pub fn yates_2x2_closed(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let (a, b, c, d) = (a as f64, b as f64, c as f64, d as f64);
    let n = a + b + c + d;
    let diff = ((a * d - b * c).abs() - n / 2.0).max(0.0);
    n * diff * diff / ((a + b) * (c + d) * (a + c) * (b + d))
}

// ---------------------------------------------------------------------------
// Rank-sum permutation test

fn midranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|v| {
            let below = values.iter().filter(|w| *w < v).count() as f64;
            let equal = values.iter().filter(|w| *w == v).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

/// `P(W ≥ w_obs)` over every choice of `cases.len()` positions as cases.
pub fn permutation_p(cases: &[f64], controls: &[f64]) -> f64 {
    let all: Vec<f64> = cases.iter().chain(controls).copied().collect();
    let ranks = midranks(&all);
    let n = all.len();
    let observed: f64 = ranks[..cases.len()].iter().sum();
    let (mut hit, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != cases.len() {
            continue;
        }
        total += 1;
        let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if w >= observed - 1e-9 {
            hit += 1;
        }
    }
    hit as f64 / total as f64
}

// ---------------------------------------------------------------------------
// Misc

pub fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, var.sqrt())
}

/// `n` phrases of one to six words drawn from `words`.
pub fn random_phrases(rng: &mut impl rand::Rng, words: &[&str], n: usize) -> Vec<String> {
    (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=6);
            (0..len).map(|_| words[rng.gen_range(0..words.len())]).collect::<Vec<_>>().join(" ")
        })
        .collect()
}

pub fn count_by<K: Ord, I: IntoIterator<Item = K>>(it: I) -> BTreeMap<K, usize> {
    let mut m = BTreeMap::new();
    for k in it {
        *m.entry(k).or_default() += 1;
    }
    m
}

pub fn file_map(dir: &Path) -> HashMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}
