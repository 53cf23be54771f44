//! Output files: mappings.tsv, summary.json, SSSOM-style TSV, coverage and
//! PheRS reports. Every writer is deterministic for a given input.

use std::collections::BTreeMap;
use std::io::{self, Read, Write};

use serde::Serialize;

use crate::eval::{
    Bucket, CohortStats, CoverageReport, ErrorBuckets, PhersResult, Posthoc, StatResult, WilcoxonResult,
    SD_KIND,
};
use crate::ingest::{ConceptSet, IngestError, OntologySet, Tsv};
use crate::lexical::TokenizerConfig;
use crate::model::evidence::parse_atoms;
use crate::model::{
    validate_record, ConceptId, Domain, EvidenceKind, Level, Logic, MappingCategory, MappingRecord,
    Ontology, Outcome, UnmappedReason,
};
use crate::similarity::{SimilarityConfig, FILTER_SCOPE, IDF_FORMULA};

pub const MAPPING_COLUMNS: [&str; 12] = [
    "concept_id",
    "domain",
    "ontology",
    "category",
    "level",
    "logic",
    "targets",
    "target_labels",
    "score",
    "evidence",
    "unmapped_reason",
    "result",
];

fn clean(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            '\t' | '\n' | '\r' => ' ',
            '|' => '/',
            c => c,
        })
        .collect()
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|t| t.to_string()).collect::<Vec<_>>().join("|")
}

/// Writes one row per record. Labels are looked up in `classes` when given;
/// unknown targets get an empty label.
pub fn write_mappings<W: Write>(
    out: &mut W,
    records: &[MappingRecord],
    classes: Option<&OntologySet>,
) -> io::Result<()> {
    writeln!(out, "{}", MAPPING_COLUMNS.join("\t"))?;
    for r in records {
        let labels = join(
            r.targets
                .iter()
                .map(|t| classes.and_then(|c| c.get(t)).map_or(String::new(), |k| clean(&k.label))),
        );
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.concept_id,
            r.domain,
            r.ontology,
            r.category.display(),
            r.level,
            r.logic.as_ref().map_or(String::new(), Logic::to_string),
            join(&r.targets),
            labels,
            r.score.map_or(String::new(), |s| format!("{s:.6}")),
            r.evidence_string(),
            r.unmapped_reason.map_or("", UnmappedReason::code),
            r.result.map_or("", Outcome::as_str),
        )?;
    }
    Ok(())
}

/// Reads a mappings file back into validated records. Target labels are ignored.
pub fn read_mappings<R: Read>(path: &str, input: R) -> Result<Vec<MappingRecord>, IngestError> {
    let required = &MAPPING_COLUMNS[..11];
    let mut tsv = Tsv::new(path, input, required)?;
    let idx: Vec<usize> = required.iter().map(|c| tsv.col(c)).collect();
    let result_col = tsv.column("result");
    let path = tsv.path.clone();
    let mut out = Vec::new();
    for row in tsv.rows() {
        let row = row?;
        let line = row.line;
        let bad = |message: String| IngestError::MalformedRow { path: path.clone(), line, message };
        let f = |i: usize| row.get(idx[i]);
        let concept_id: ConceptId = f(0).parse().map_err(|e| bad(format!("{e}")))?;
        let domain: Domain = f(1).parse().map_err(|e| bad(format!("{e}")))?;
        let ontology: Ontology = f(2).parse().map_err(|_| IngestError::UnknownOntology {
            path: path.clone(),
            line,
            value: f(2).to_string(),
        })?;
        let category =
            MappingCategory::from_display(f(3)).ok_or_else(|| bad(format!("unknown category {:?}", f(3))))?;
        let level: Level = f(4).parse().map_err(|e| bad(format!("{e}")))?;
        let logic = match f(5) {
            "" => None,
            s => Some(s.parse::<Logic>().map_err(|e| bad(format!("{e}")))?),
        };
        let targets = crate::ingest::split_multi(f(6))
            .map(|t| {
                t.parse().map_err(|_| IngestError::BadCurie {
                    path: path.clone(),
                    line,
                    curie: t.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let score = match f(8) {
            "" => None,
            s => Some(s.parse::<f64>().map_err(|e| bad(format!("score {s:?}: {e}")))?),
        };
        let evidence = parse_atoms(f(9)).map_err(|e| bad(format!("{e}")))?;
        let unmapped_reason = match f(10) {
            "" => None,
            s => Some(s.parse::<UnmappedReason>().map_err(|_| IngestError::UnknownReason {
                path: path.clone(),
                line,
                value: s.to_string(),
            })?),
        };
        let result = match result_col.map(|c| row.get(c)).unwrap_or("") {
            "" => None,
            s => Some(s.parse::<Outcome>().map_err(|e| bad(format!("{e}")))?),
        };
        let record = MappingRecord {
            concept_id,
            domain,
            ontology,
            category,
            level,
            logic,
            targets,
            score,
            evidence,
            unmapped_reason,
            result,
        };
        validate_record(&record).map_err(|v| bad(format!("{} at {}", v.kind.as_str(), v.path)))?;
        out.push(record);
    }
    Ok(out)
}

pub fn load_mappings(path: &std::path::Path) -> Result<Vec<MappingRecord>, IngestError> {
    read_mappings(&path.display().to_string(), crate::ingest::open(path)?)
}

/// Evidence classes reported in the summary, in table order.
pub const EVIDENCE_CLASSES: [&str; 6] = [
    "Database Cross-References",
    "Synonyms",
    "Labels",
    "Definitions",
    "Cosine Similarity",
    "Biocuration",
];

fn evidence_class(kind: EvidenceKind) -> Option<&'static str> {
    match kind {
        EvidenceKind::XrefMatch | EvidenceKind::CuiMatch => Some(EVIDENCE_CLASSES[0]),
        EvidenceKind::SynonymMatch => Some(EVIDENCE_CLASSES[1]),
        EvidenceKind::LabelMatch => Some(EVIDENCE_CLASSES[2]),
        EvidenceKind::DefinitionMatch => Some(EVIDENCE_CLASSES[3]),
        EvidenceKind::CosineScore => Some(EVIDENCE_CLASSES[4]),
        EvidenceKind::ManualSource => Some(EVIDENCE_CLASSES[5]),
        EvidenceKind::ExclusionReason => None,
    }
}

/// Counts for one (domain, ontology, used-in-practice) column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryColumn {
    pub categories: BTreeMap<&'static str, u64>,
    pub total_mapped: u64,
    pub evidence: BTreeMap<&'static str, u64>,
    pub total_evidence: u64,
    pub unmapped: BTreeMap<&'static str, u64>,
    pub total_unmapped: u64,
    /// Measurement result rows by category; not part of the totals above.
    pub result_rows: BTreeMap<&'static str, u64>,
}

impl SummaryColumn {
    fn zero() -> Self {
        let mapped = MappingCategory::ALL.iter().filter(|c| **c != MappingCategory::Unmapped);
        Self {
            categories: mapped.map(|c| (c.display(), 0)).collect(),
            total_mapped: 0,
            evidence: EVIDENCE_CLASSES.iter().map(|e| (*e, 0)).collect(),
            total_evidence: 0,
            unmapped: UnmappedReason::ALL.iter().map(|r| (r.display(), 0)).collect(),
            total_unmapped: 0,
            result_rows: BTreeMap::new(),
        }
    }

    fn add(&mut self, r: &MappingRecord) {
        if r.result.is_some() {
            *self.result_rows.entry(r.category.display()).or_default() += 1;
            return;
        }
        match r.unmapped_reason {
            Some(reason) => {
                *self.unmapped.entry(reason.display()).or_default() += 1;
                self.total_unmapped += 1;
            }
            None => {
                *self.categories.entry(r.category.display()).or_default() += 1;
                self.total_mapped += 1;
                for a in &r.evidence {
                    if let Some(class) = evidence_class(a.kind) {
                        *self.evidence.entry(class).or_default() += 1;
                        self.total_evidence += 1;
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TokenizerSummary {
    pub stopwords: usize,
    pub lemmatize: crate::lexical::Lemmatize,
    pub min_token_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryMetadata {
    pub idf: &'static str,
    pub filter_scope: &'static str,
    pub tau: f64,
    pub rho: f64,
    pub tokenizer: TokenizerSummary,
}

impl SummaryMetadata {
    pub fn new(similarity: &SimilarityConfig, tokenizer: &TokenizerConfig) -> Self {
        Self {
            idf: IDF_FORMULA,
            filter_scope: FILTER_SCOPE,
            tau: similarity.tau,
            rho: similarity.rho,
            tokenizer: TokenizerSummary {
                stopwords: tokenizer.stopwords.len(),
                lemmatize: tokenizer.lemmatize,
                min_token_len: tokenizer.min_token_len,
            },
        }
    }
}

/// Per domain, per ontology, per used-in-practice ("yes"/"no") counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MappingSummary {
    pub concepts: BTreeMap<Domain, u64>,
    pub tables: BTreeMap<Domain, BTreeMap<Ontology, BTreeMap<&'static str, SummaryColumn>>>,
    pub metadata: SummaryMetadata,
}

fn usage_key(used: bool) -> &'static str {
    if used {
        "yes"
    } else {
        "no"
    }
}

/// Builds the summary. Every configured (domain, ontology) appears, zeroed
/// when it has no records.
pub fn summarize(
    records: &[MappingRecord],
    concepts: &ConceptSet,
    ontologies: &BTreeMap<Domain, Vec<Ontology>>,
    metadata: SummaryMetadata,
) -> MappingSummary {
    let mut tables: BTreeMap<Domain, BTreeMap<Ontology, BTreeMap<&'static str, SummaryColumn>>> = BTreeMap::new();
    let blank = || [true, false].map(|u| (usage_key(u), SummaryColumn::zero())).into();
    for (d, os) in ontologies {
        let t = tables.entry(*d).or_default();
        for o in os {
            t.entry(*o).or_insert_with(blank);
        }
    }
    for r in records {
        let used = concepts.get(r.concept_id).is_some_and(|c| c.used_in_practice);
        tables
            .entry(r.domain)
            .or_default()
            .entry(r.ontology)
            .or_insert_with(blank)
            .get_mut(usage_key(used))
            .expect("both usage columns exist")
            .add(r);
    }
    let mut counts: BTreeMap<Domain, u64> = ontologies.keys().map(|d| (*d, 0)).collect();
    for c in concepts.iter() {
        *counts.entry(c.domain).or_default() += 1;
    }
    MappingSummary { concepts: counts, tables, metadata }
}

pub fn write_json<W: Write, T: Serialize>(out: &mut W, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

pub const SSSOM_COLUMNS: [&str; 10] = [
    "record_id",
    "subject_id",
    "subject_label",
    "predicate_id",
    "predicate_modifier",
    "object_id",
    "object_label",
    "mapping_justification",
    "confidence",
    "comment",
];

const OBO_BASE: &str = "http://purl.obolibrary.org/obo/";

/// Predicate for a mapped record: exact for one-to-one concept-level
/// mappings, close for cosine, broad for ancestor-level, related for
/// one-to-many and measurement result rows.
pub fn sssom_predicate(r: &MappingRecord) -> &'static str {
    use MappingCategory::*;
    if r.result.is_some() {
        return "skos:relatedMatch";
    }
    match r.category {
        AutoOneToOneConcept | ManualOneToOneConcept => "skos:exactMatch",
        CosineOneToOneConcept => "skos:closeMatch",
        AutoOneToOneAncestor | AutoOneToManyAncestor => "skos:broadMatch",
        AutoOneToManyConcept | ManualOneToManyConcept | Unmapped => "skos:relatedMatch",
    }
}

pub fn sssom_justification(category: MappingCategory) -> &'static str {
    if category.is_manual() {
        "semapv:ManualMappingCuration"
    } else if category == MappingCategory::CosineOneToOneConcept {
        "semapv:LexicalSimilarityThresholdMatching"
    } else {
        "semapv:LexicalMatching"
    }
}

/// Record id shared by every row flattened from one record.
pub fn record_id(r: &MappingRecord) -> String {
    match r.result {
        Some(o) => format!("{}/{}/{}", r.concept_id, r.ontology, o),
        None => format!("{}/{}", r.concept_id, r.ontology),
    }
}

/// One row per (mapped record, target). Unmapped records are skipped.
/// Returns the number of rows written.
pub fn write_sssom<W: Write>(
    out: &mut W,
    records: &[MappingRecord],
    concepts: Option<&ConceptSet>,
    classes: Option<&OntologySet>,
) -> io::Result<usize> {
    let mapped: Vec<&MappingRecord> = records.iter().filter(|r| r.is_mapped()).collect();
    let mut prefixes: BTreeMap<String, String> = BTreeMap::new();
    prefixes.insert("OMOP".into(), "https://athena.ohdsi.org/search-terms/terms/".into());
    prefixes.insert("semapv".into(), "https://w3id.org/semapv/vocab/".into());
    prefixes.insert("skos".into(), "http://www.w3.org/2004/02/skos/core#".into());
    for r in &mapped {
        let p = r.ontology.curie_prefix();
        prefixes.insert(p.into(), format!("{OBO_BASE}{p}_"));
    }
    writeln!(out, "#curie_map:")?;
    for (p, url) in &prefixes {
        writeln!(out, "#  {p}: \"{url}\"")?;
    }
    writeln!(out, "{}", SSSOM_COLUMNS.join("\t"))?;
    let mut rows = 0;
    for r in mapped {
        let concept = concepts.and_then(|c| c.get(r.concept_id));
        let subject = concept.map_or_else(|| format!("OMOP:{}", r.concept_id), |c| c.code.to_string());
        let subject_label = concept.map_or(String::new(), |c| clean(&c.label));
        let negated: Vec<bool> = {
            let mut v = vec![false; r.targets.len()];
            for t in r.logic.iter().flat_map(Logic::terms) {
                if let (true, Some(slot)) = (t.is_negated(), v.get_mut(t.index())) {
                    *slot = true;
                }
            }
            v
        };
        for (t, neg) in r.targets.iter().zip(negated) {
            let object_label = classes.and_then(|c| c.get(t)).map_or(String::new(), |k| clean(&k.label));
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                record_id(r),
                subject,
                subject_label,
                sssom_predicate(r),
                if neg { "Not" } else { "" },
                t,
                object_label,
                sssom_justification(r.category),
                r.score.map_or(String::new(), |s| format!("{s:.6}")),
                r.evidence_string(),
            )?;
            rows += 1;
        }
    }
    Ok(rows)
}

/// Summary of the post-hoc comparisons stored in coverage.json.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosthocSummary {
    pub alpha: f64,
    pub threshold: f64,
    pub comparisons: usize,
    pub significant: usize,
    pub fraction_significant: f64,
}

impl From<&Posthoc> for PosthocSummary {
    fn from(p: &Posthoc) -> Self {
        Self {
            alpha: p.alpha,
            threshold: p.threshold,
            comparisons: p.pairs.len(),
            significant: p.pairs.iter().filter(|x| x.significant).count(),
            fraction_significant: p.fraction_significant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageOutput<'a> {
    pub mapped_concepts: usize,
    pub prevalence_floor: u64,
    #[serde(flatten)]
    pub report: &'a CoverageReport,
    /// Sites × (covered, uncovered) test; absent with a reason when undefined.
    pub omnibus: Option<StatResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omnibus_note: Option<String>,
    pub posthoc: PosthocSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub buckets: Option<&'a ErrorBuckets>,
}

pub fn write_pairwise<W: Write>(out: &mut W, posthoc: &Posthoc) -> io::Result<()> {
    writeln!(out, "site_a\tsite_b\tstatistic\tp_value\tsignificant")?;
    for p in &posthoc.pairs {
        writeln!(
            out,
            "{}\t{}\t{:.6}\t{:.6e}\t{}",
            p.site_a, p.site_b, p.statistic, p.p_value, p.significant
        )?;
    }
    Ok(())
}

pub fn write_buckets<W: Write>(out: &mut W, buckets: &ErrorBuckets) -> io::Result<()> {
    writeln!(
        out,
        "bucket\tcount\tfraction_pct\tmean_site_count\tmean_avg_frequency\tmin_avg_frequency\tmax_avg_frequency"
    )?;
    for b in Bucket::ALL {
        let s = &buckets.buckets[&b];
        writeln!(
            out,
            "{}\t{}\t{:.1}\t{:.3}\t{:.3}\t{:.3}\t{:.3}",
            b.as_str(),
            s.count,
            s.fraction_pct,
            s.mean_site_count,
            s.mean_avg_frequency,
            s.min_avg_frequency,
            s.max_avg_frequency
        )?;
    }
    Ok(())
}

pub fn write_bucket_members<W: Write>(out: &mut W, buckets: &ErrorBuckets) -> io::Result<()> {
    writeln!(out, "bucket\tconcept_id")?;
    for b in Bucket::ALL {
        for id in &buckets.buckets[&b].concepts {
            writeln!(out, "{}\t{id}", b.as_str())?;
        }
    }
    Ok(())
}

pub fn write_phers<W: Write>(out: &mut W, result: &PhersResult) -> io::Result<()> {
    writeln!(out, "patient_id\traw\tstandardized\tgroup")?;
    for s in &result.scores {
        writeln!(out, "{}\t{:.6}\t{:.6}\t{}", s.patient_id, s.raw, s.standardized, s.group.unwrap_or(""))?;
    }
    Ok(())
}

/// Contents of test.json: the rank-sum test plus per-group standardized statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhersTestOutput {
    pub test: &'static str,
    pub alternative: &'static str,
    pub sd: &'static str,
    pub wilcoxon: WilcoxonResult,
    pub raw: CohortStats,
    pub groups: BTreeMap<&'static str, CohortStats>,
}

impl PhersTestOutput {
    pub fn new(wilcoxon: WilcoxonResult, result: &PhersResult, groups: BTreeMap<&'static str, CohortStats>) -> Self {
        Self {
            test: "wilcoxon_rank_sum",
            alternative: "cases greater than controls",
            sd: SD_KIND,
            wilcoxon,
            raw: result.raw_stats.clone(),
            groups,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Curie, EvidenceAtom, Term};

    fn cid(n: u64) -> ConceptId {
        ConceptId::new(n).unwrap()
    }

    fn two_target() -> MappingRecord {
        MappingRecord {
            concept_id: cid(78854),
            domain: Domain::Condition,
            ontology: Ontology::Mondo,
            category: MappingCategory::AutoOneToManyConcept,
            level: Level::Concept,
            logic: Some(Logic::conjunction(2)),
            targets: vec![Curie::parse("MONDO:0001414").unwrap(), Curie::parse("MONDO:0008157").unwrap()],
            score: None,
            evidence: vec![EvidenceAtom::new(EvidenceKind::LabelMatch, "osteopoikilosis")],
            unmapped_reason: None,
            result: None,
        }
    }

    #[test]
    fn mappings_round_trip() {
        let records = vec![
            two_target(),
            MappingRecord::unmapped(cid(432498), Domain::Condition, Ontology::Hp, UnmappedReason::Injury, vec![]),
        ];
        let mut buf = Vec::new();
        write_mappings(&mut buf, &records, None).unwrap();
        let back = read_mappings("m.tsv", buf.as_slice()).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn and_of_two_flattens_to_two_rows() {
        let mut buf = Vec::new();
        let n = write_sssom(&mut buf, &[two_target()], None, None).unwrap();
        assert_eq!(n, 2);
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("78854/")).collect();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.contains("skos:relatedMatch") && r.contains("OMOP:78854")));
    }

    #[test]
    fn negated_target_gets_modifier() {
        let mut r = two_target();
        r.category = MappingCategory::ManualOneToOneConcept;
        r.targets.truncate(1);
        r.logic = Some(Logic::Single(Term::Not(0)));
        r.evidence = vec![EvidenceAtom::new(EvidenceKind::ManualSource, "x")];
        r.result = Some(Outcome::Normal);
        let mut buf = Vec::new();
        write_sssom(&mut buf, &[r], None, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row = text.lines().last().unwrap();
        assert_eq!(row.split('\t').nth(4), Some("Not"));
        assert!(row.starts_with("78854/MONDO/NORMAL\t"));
    }

    #[test]
    fn empty_summary_is_zeroed() {
        let ontologies: BTreeMap<_, _> = [(Domain::Condition, vec![Ontology::Hp, Ontology::Mondo])].into();
        let meta = SummaryMetadata::new(&SimilarityConfig::default(), &TokenizerConfig::plain());
        let s = summarize(&[], &ConceptSet::new(), &ontologies, meta);
        let col = &s.tables[&Domain::Condition][&Ontology::Hp]["yes"];
        assert_eq!(col.total_mapped + col.total_unmapped + col.total_evidence, 0);
        assert_eq!(col.categories.len(), 7);
    }
}
