//! TF-IDF bag-of-words model over concept and class strings, cosine scoring
//! through an inverted index, and the score filters.
//!
//! Weighting: `tf` is the raw token count, `idf(t) = ln((1 + N) / (1 + df(t))) + 1`,
//! rows are L2-normalized. Rows are stored in compressed sparse row form with
//! column indexes in ascending token order.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use rayon::prelude::*;

use crate::ingest::{ConceptSet, OntologySet};
use crate::lexical::{normalize_string, tokenize, TokenizerConfig};
use crate::model::{ConceptId, Curie, Ontology, StringRole};

/// Text recorded in run metadata.
pub const IDF_FORMULA: &str = "ln((1 + N) / (1 + df)) + 1";
/// Scope of the top-fraction filter, recorded in run metadata.
pub const FILTER_SCOPE: &str = "per (domain, ontology)";

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SimilarityError {
    #[error("EMPTY_CORPUS: no strings to fit")]
    EmptyCorpus,
    #[error("score floor must lie in [0, 1], got {0}")]
    BadTau(f64),
    #[error("keep fraction must lie in (0, 1], got {0}")]
    BadRho(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityConfig {
    pub tau: f64,
    pub rho: f64,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        Self { tau: 0.25, rho: 0.75 }
    }
}

impl SimilarityConfig {
    pub fn new(tau: f64, rho: f64) -> Result<Self, SimilarityError> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(SimilarityError::BadTau(tau));
        }
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(SimilarityError::BadRho(rho));
        }
        Ok(Self { tau, rho })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Owner {
    Clinical(ConceptId),
    Ontology(Curie),
}

impl Owner {
    pub fn side(&self) -> &'static str {
        match self {
            Owner::Clinical(_) => "CLINICAL",
            Owner::Ontology(_) => "ONTOLOGY",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowMeta {
    pub owner: Owner,
    pub role: StringRole,
    pub text: String,
}

/// Fitted document-term matrix.
#[derive(Debug, Clone)]
pub struct SimilarityModel {
    vocabulary: Vec<String>,
    idf: Vec<f64>,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
    meta: Vec<RowMeta>,
}

impl SimilarityModel {
    /// Fits the model over `docs`, tokenizing each with `tokenizer`.
    pub fn fit(docs: Vec<RowMeta>, tokenizer: &TokenizerConfig) -> Result<Self, SimilarityError> {
        if docs.is_empty() {
            return Err(SimilarityError::EmptyCorpus);
        }
        let tokenized: Vec<Vec<String>> = docs
            .par_iter()
            .map(|d| tokenize(&normalize_string(&d.text), tokenizer))
            .collect();

        let mut df: BTreeMap<&str, u64> = BTreeMap::new();
        for toks in &tokenized {
            let mut uniq: Vec<&str> = toks.iter().map(String::as_str).collect();
            uniq.sort_unstable();
            uniq.dedup();
            for t in uniq {
                *df.entry(t).or_default() += 1;
            }
        }
        let n = docs.len() as f64;
        let vocabulary: Vec<String> = df.keys().map(|t| t.to_string()).collect();
        let idf: Vec<f64> = df.values().map(|&d| ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0).collect();
        let column: HashMap<&str, u32> = vocabulary
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i as u32))
            .collect();

        let rows: Vec<Vec<(u32, f64)>> = tokenized
            .par_iter()
            .map(|toks| {
                let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
                for t in toks {
                    *counts.entry(column[t.as_str()]).or_default() += 1;
                }
                let mut row: Vec<(u32, f64)> = counts
                    .into_iter()
                    .map(|(c, tf)| (c, tf as f64 * idf[c as usize]))
                    .collect();
                let norm = row.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
                if norm > 0.0 {
                    for (_, v) in &mut row {
                        *v /= norm;
                    }
                }
                row
            })
            .collect();

        let mut indptr = Vec::with_capacity(rows.len() + 1);
        indptr.push(0);
        let nnz: usize = rows.iter().map(Vec::len).sum();
        let mut indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for row in rows {
            for (c, v) in row {
                indices.push(c);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        Ok(Self {
            vocabulary,
            idf,
            indptr,
            indices,
            values,
            meta: docs,
        })
    }

    /// Fits over every concept label/synonym and every active class label/synonym.
    pub fn fit_corpus(
        concepts: &ConceptSet,
        classes: &OntologySet,
        tokenizer: &TokenizerConfig,
    ) -> Result<Self, SimilarityError> {
        Self::fit(corpus(concepts, classes), tokenizer)
    }

    pub fn rows(&self) -> usize {
        self.meta.len()
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn meta(&self, row: usize) -> &RowMeta {
        &self.meta[row]
    }

    /// Column indexes and weights of one row.
    pub fn row(&self, row: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.indptr[row], self.indptr[row + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn norm(&self, row: usize) -> f64 {
        self.row(row).1.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Exact dot product of two rows.
    pub fn cosine(&self, a: usize, b: usize) -> f64 {
        let (ia, va) = self.row(a);
        let (ib, vb) = self.row(b);
        let (mut i, mut j, mut s) = (0, 0, 0.0);
        while i < ia.len() && j < ib.len() {
            match ia[i].cmp(&ib[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    s += va[i] * vb[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        s.min(1.0)
    }

    /// Writes the model as sorted text: a vocabulary block then one line per row.
    pub fn dump<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = std::io::BufWriter::new(out);
        writeln!(w, "# idf = {IDF_FORMULA}")?;
        writeln!(w, "# vocabulary\tcolumn\ttoken\tidf")?;
        for (i, (t, idf)) in self.vocabulary.iter().zip(&self.idf).enumerate() {
            writeln!(w, "V\t{i}\t{t}\t{idf:.17e}")?;
        }
        writeln!(w, "# rows\trow\tside\towner\trole\tnonzeros")?;
        for r in 0..self.rows() {
            let m = &self.meta[r];
            let owner = match &m.owner {
                Owner::Clinical(id) => id.to_string(),
                Owner::Ontology(c) => c.to_string(),
            };
            let role = match m.role {
                StringRole::Label => "LABEL",
                StringRole::Synonym => "SYNONYM",
            };
            let (ix, vs) = self.row(r);
            let nz: Vec<String> = ix.iter().zip(vs).map(|(c, v)| format!("{c}:{v:.17e}")).collect();
            writeln!(w, "R\t{r}\t{}\t{owner}\t{role}\t{}", m.owner.side(), nz.join(","))?;
        }
        w.flush()
    }
}

/// Documents for [`SimilarityModel::fit`]: concepts in id order, then active
/// classes in CURIE order, label before synonyms.
pub fn corpus(concepts: &ConceptSet, classes: &OntologySet) -> Vec<RowMeta> {
    let mut docs = Vec::new();
    for c in concepts.iter() {
        for (text, role) in c.strings() {
            docs.push(RowMeta {
                owner: Owner::Clinical(c.concept_id),
                role,
                text: text.to_string(),
            });
        }
    }
    for k in classes.active() {
        for (text, role) in k.strings() {
            docs.push(RowMeta {
                owner: Owner::Ontology(k.curie.clone()),
                role,
                text: text.to_string(),
            });
        }
    }
    docs
}

/// Best cosine between one concept and one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPair {
    pub concept_id: ConceptId,
    pub curie: Curie,
    pub score: f64,
    /// Model rows achieving the maximum (concept side, class side).
    pub concept_row: u32,
    pub class_row: u32,
}

struct Postings {
    /// Per column: (class row, weight), rows ascending.
    lists: Vec<Vec<(u32, f64)>>,
    /// Owner index of each class row (`u32::MAX` for clinical rows).
    row_owner: Vec<u32>,
    owners: Vec<Curie>,
    clinical: BTreeMap<ConceptId, Vec<u32>>,
}

fn postings(model: &SimilarityModel) -> Postings {
    let mut lists = vec![Vec::new(); model.vocabulary.len()];
    let mut row_owner = vec![u32::MAX; model.rows()];
    let mut owner_ids: BTreeMap<&Curie, u32> = BTreeMap::new();
    let mut clinical: BTreeMap<ConceptId, Vec<u32>> = BTreeMap::new();
    for (r, meta) in model.meta.iter().enumerate() {
        match &meta.owner {
            Owner::Clinical(id) => clinical.entry(*id).or_default().push(r as u32),
            Owner::Ontology(curie) => {
                let next = owner_ids.len() as u32;
                row_owner[r] = *owner_ids.entry(curie).or_insert(next);
                let (ix, vs) = model.row(r);
                for (&c, &v) in ix.iter().zip(vs) {
                    lists[c as usize].push((r as u32, v));
                }
            }
        }
    }
    let mut owners = vec![None; owner_ids.len()];
    for (curie, id) in owner_ids {
        owners[id as usize] = Some(curie.clone());
    }
    Postings {
        lists,
        row_owner,
        owners: owners.into_iter().map(Option::unwrap).collect(),
        clinical,
    }
}

/// Scores every (concept, class) pair that shares at least one token and
/// passes `allowed`. The pair score is the maximum cosine over the concept's
/// and class's string rows; ties keep the smallest row numbers. Pairs below
/// `floor` are dropped early, which only saves memory when `floor` is at most
/// the filter threshold.
///
/// Output is ordered by concept id, then CURIE, independent of `jobs`.
pub fn score_concept_pairs<F>(model: &SimilarityModel, allowed: F, floor: f64) -> Vec<ScoredPair>
where
    F: Fn(ConceptId, Ontology) -> bool + Sync,
{
    let p = postings(model);
    let concepts: Vec<(&ConceptId, &Vec<u32>)> = p.clinical.iter().collect();
    let n_rows = model.rows();
    concepts
        .par_chunks(64)
        .map_init(
            || (vec![0.0f64; n_rows], Vec::<u32>::new()),
            |(acc, touched), chunk| {
                let mut out = Vec::new();
                for &(&concept_id, rows) in chunk {
                    // best (score, concept_row, class_row) per class owner
                    let mut best: BTreeMap<u32, (f64, u32, u32)> = BTreeMap::new();
                    for &crow in rows {
                        let (ix, vs) = model.row(crow as usize);
                        for (&c, &v) in ix.iter().zip(vs) {
                            for &(orow, w) in &p.lists[c as usize] {
                                if acc[orow as usize] == 0.0 {
                                    touched.push(orow);
                                }
                                acc[orow as usize] += v * w;
                            }
                        }
                        for &orow in touched.iter() {
                            let s = acc[orow as usize].min(1.0);
                            acc[orow as usize] = 0.0;
                            let owner = p.row_owner[orow as usize];
                            let cand = (s, crow, orow);
                            best.entry(owner)
                                .and_modify(|b| {
                                    if s > b.0 || (s == b.0 && (crow, orow) < (b.1, b.2)) {
                                        *b = cand;
                                    }
                                })
                                .or_insert(cand);
                        }
                        touched.clear();
                    }
                    let mut pairs: Vec<ScoredPair> = best
                        .into_iter()
                        .filter(|(_, b)| b.0 > 0.0 && b.0 >= floor)
                        .filter(|(owner, _)| allowed(concept_id, p.owners[*owner as usize].ontology()))
                        .map(|(owner, (score, concept_row, class_row))| ScoredPair {
                            concept_id,
                            curie: p.owners[owner as usize].clone(),
                            score,
                            concept_row,
                            class_row,
                        })
                        .collect();
                    pairs.sort_by(|a, b| a.curie.cmp(&b.curie));
                    out.extend(pairs);
                }
                out
            },
        )
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// `⌈rho · k⌉`, absorbing floating-point noise below 1e-7 so that a decimal
/// `rho` behaves as written (`0.1 · 10` keeps 1, not 2).
pub fn keep_count(rho: f64, k: usize) -> usize {
    if k == 0 {
        return 0;
    }
    let raw = (rho * k as f64 - 1e-7).ceil();
    (raw.max(1.0) as usize).min(k)
}

fn by_score_desc(a: &ScoredPair, b: &ScoredPair) -> std::cmp::Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.concept_id.cmp(&b.concept_id))
        .then(a.curie.cmp(&b.curie))
}

/// Drops scores below tau, sorts descending (ties by concept id then CURIE)
/// and keeps the first `⌈rho · k⌉` of the `k` survivors.
pub fn filter_pairs(pairs: Vec<ScoredPair>, cfg: &SimilarityConfig) -> Vec<ScoredPair> {
    let mut kept: Vec<ScoredPair> = pairs.into_iter().filter(|p| p.score >= cfg.tau).collect();
    kept.sort_by(by_score_desc);
    let n = keep_count(cfg.rho, kept.len());
    kept.truncate(n);
    kept
}

/// Applies [`filter_pairs`] separately to each target ontology.
pub fn filter_per_ontology(pairs: Vec<ScoredPair>, cfg: &SimilarityConfig) -> Vec<ScoredPair> {
    let mut groups: BTreeMap<Ontology, Vec<ScoredPair>> = BTreeMap::new();
    for p in pairs {
        groups.entry(p.curie.ontology()).or_default().push(p);
    }
    groups.into_values().flat_map(|g| filter_pairs(g, cfg)).collect()
}

/// Highest-scoring pair per (concept, ontology); ties go to the smallest CURIE.
pub fn best_per_concept(pairs: &[ScoredPair]) -> BTreeMap<(ConceptId, Ontology), ScoredPair> {
    let mut out: BTreeMap<(ConceptId, Ontology), ScoredPair> = BTreeMap::new();
    for p in pairs {
        let key = (p.concept_id, p.curie.ontology());
        match out.get(&key) {
            Some(b) if b.score > p.score || (b.score == p.score && b.curie <= p.curie) => {}
            _ => {
                out.insert(key, p.clone());
            }
        }
    }
    out
}
