use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::EvalError;
use crate::ingest::SiteFrequency;
use crate::model::ConceptId;

/// Rounds a percentage to one decimal place for reporting.
pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

fn pct(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        100.0 * num / den
    }
}

/// Overlap / mapping-only / site-only counts for one site or the pool.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionCounts {
    pub overlap: usize,
    pub mapping_only: usize,
    pub site_only: usize,
    pub site_total: usize,
    pub overlap_frequency: u64,
    pub site_frequency: u64,
    pub unweighted_coverage_pct: f64,
    pub weighted_coverage_pct: f64,
}

/// Coverage of a mapping set against per-site concept usage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub pooled: PartitionCounts,
    pub per_site: BTreeMap<String, PartitionCounts>,
    #[serde(skip)]
    pub overlap_concepts: BTreeSet<ConceptId>,
    #[serde(skip)]
    pub site_only_concepts: BTreeSet<ConceptId>,
}

impl CoverageReport {
    /// `(site, covered, uncovered)` concept counts, the input to the post-hoc tests.
    pub fn site_table(&self) -> Vec<(String, u64, u64)> {
        self.per_site
            .iter()
            .map(|(s, c)| (s.clone(), c.overlap as u64, c.site_only as u64))
            .collect()
    }
}

fn partition(mapped: &BTreeSet<ConceptId>, freq: &BTreeMap<ConceptId, u64>) -> PartitionCounts {
    let mut overlap = 0;
    let mut overlap_frequency = 0u64;
    let mut site_frequency = 0u64;
    for (id, &f) in freq {
        site_frequency += f;
        if mapped.contains(id) {
            overlap += 1;
            overlap_frequency += f;
        }
    }
    let site_total = freq.len();
    PartitionCounts {
        overlap,
        mapping_only: mapped.len() - overlap,
        site_only: site_total - overlap,
        site_total,
        overlap_frequency,
        site_frequency,
        unweighted_coverage_pct: pct(overlap as f64, site_total as f64),
        weighted_coverage_pct: pct(overlap_frequency as f64, site_frequency as f64),
    }
}

/// Partitions the pooled site concepts (union over sites) and each site
/// against the mapped set. Weighted coverage sums post-floor frequencies
/// across sites.
pub fn partition_coverage(
    mapped: &BTreeSet<ConceptId>,
    freqs: &[SiteFrequency],
) -> Result<CoverageReport, EvalError> {
    if freqs.is_empty() {
        return Err(EvalError::EmptySiteData);
    }
    let mut pooled: BTreeMap<ConceptId, u64> = BTreeMap::new();
    let mut sites: BTreeMap<String, BTreeMap<ConceptId, u64>> = BTreeMap::new();
    for f in freqs {
        *pooled.entry(f.concept_id).or_default() += f.record_count;
        *sites.entry(f.site_id.clone()).or_default().entry(f.concept_id).or_default() += f.record_count;
    }
    let (overlap_concepts, site_only_concepts) = pooled.keys().partition(|id| mapped.contains(id));
    Ok(CoverageReport {
        pooled: partition(mapped, &pooled),
        per_site: sites.iter().map(|(s, f)| (s.clone(), partition(mapped, f))).collect(),
        overlap_concepts,
        site_only_concepts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Bucket {
    RecoveredNewerCdm,
    PurposefullyExcluded,
    TrulyMissing,
}

impl Bucket {
    pub const ALL: [Bucket; 3] = [Bucket::RecoveredNewerCdm, Bucket::PurposefullyExcluded, Bucket::TrulyMissing];

    pub fn as_str(self) -> &'static str {
        match self {
            Bucket::RecoveredNewerCdm => "RECOVERED_NEWER_CDM",
            Bucket::PurposefullyExcluded => "PURPOSEFULLY_EXCLUDED",
            Bucket::TrulyMissing => "TRULY_MISSING",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketStats {
    pub count: usize,
    /// Share of the site-only set, in percent.
    pub fraction_pct: f64,
    /// Mean number of sites holding each concept.
    pub mean_site_count: f64,
    /// Per concept: total frequency divided by the number of sites holding it.
    pub mean_avg_frequency: f64,
    pub min_avg_frequency: f64,
    pub max_avg_frequency: f64,
    #[serde(skip)]
    pub concepts: Vec<ConceptId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBuckets {
    pub total: usize,
    pub buckets: BTreeMap<Bucket, BucketStats>,
}

/// Assigns each site-only concept to one bucket, by priority: newer CDM,
/// then purposefully excluded, then truly missing.
pub fn bucket_errors(
    site_only: &BTreeSet<ConceptId>,
    newer_cdm: &BTreeSet<ConceptId>,
    excluded: &BTreeSet<ConceptId>,
    freqs: &[SiteFrequency],
) -> ErrorBuckets {
    let mut usage: BTreeMap<ConceptId, (BTreeSet<&str>, u64)> = BTreeMap::new();
    for f in freqs.iter().filter(|f| site_only.contains(&f.concept_id)) {
        let e = usage.entry(f.concept_id).or_default();
        e.0.insert(&f.site_id);
        e.1 += f.record_count;
    }
    let mut members: BTreeMap<Bucket, Vec<ConceptId>> = Bucket::ALL.iter().map(|&b| (b, Vec::new())).collect();
    for &id in site_only {
        let b = if newer_cdm.contains(&id) {
            Bucket::RecoveredNewerCdm
        } else if excluded.contains(&id) {
            Bucket::PurposefullyExcluded
        } else {
            Bucket::TrulyMissing
        };
        members.get_mut(&b).unwrap().push(id);
    }
    let total = site_only.len();
    let buckets = members
        .into_iter()
        .map(|(b, concepts)| {
            let mut site_counts = Vec::with_capacity(concepts.len());
            let mut avgs = Vec::with_capacity(concepts.len());
            for id in &concepts {
                if let Some((sites, freq)) = usage.get(id) {
                    site_counts.push(sites.len() as f64);
                    avgs.push(*freq as f64 / sites.len() as f64);
                }
            }
            let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
            let stats = BucketStats {
                count: concepts.len(),
                fraction_pct: pct(concepts.len() as f64, total as f64),
                mean_site_count: mean(&site_counts),
                mean_avg_frequency: mean(&avgs),
                min_avg_frequency: avgs.iter().copied().reduce(f64::min).unwrap_or(0.0),
                max_avg_frequency: avgs.iter().copied().reduce(f64::max).unwrap_or(0.0),
                concepts,
            };
            (b, stats)
        })
        .collect();
    ErrorBuckets { total, buckets }
}
