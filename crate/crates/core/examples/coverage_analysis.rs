//! Coverage of a mapping set against per-site concept usage, with the
//! omnibus and Bonferroni pairwise tests and the error buckets.
//!
//!     cargo run --example coverage_analysis

use std::collections::BTreeSet;

use termbridge::eval::{bonferroni_pairwise, bucket_errors, chi_square_yates, partition_coverage, round1};
use termbridge::ingest::{SiteFrequency, PREVALENCE_FLOOR};
use termbridge::model::ConceptId;

fn id(n: u64) -> ConceptId {
    ConceptId::new(n).expect("positive id")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // concepts 1..=900 are mapped; each site uses a different slice of 1..=1000
    let mapped: BTreeSet<ConceptId> = (1..=900).map(id).collect();
    let sites = [("north", 1..=700), ("south", 250..=950), ("east", 600..=1000)];
    let mut freqs = Vec::new();
    for (site, range) in sites {
        for n in range {
            let count = (n * 37 % 1000).max(PREVALENCE_FLOOR);
            freqs.push(SiteFrequency { site_id: site.into(), concept_id: id(n), record_count: count });
        }
    }
    let report = partition_coverage(&mapped, &freqs)?;
    let p = &report.pooled;
    println!(
        "pooled: {} of {} site concepts mapped, unweighted {}%, weighted {}%",
        p.overlap,
        p.site_total,
        round1(p.unweighted_coverage_pct),
        round1(p.weighted_coverage_pct)
    );
    for (site, c) in &report.per_site {
        println!("  {site:<6} {}/{} = {}%", c.overlap, c.site_total, round1(c.unweighted_coverage_pct));
    }

    let table = report.site_table();
    let rows: Vec<Vec<u64>> = table.iter().map(|(_, a, b)| vec![*a, *b]).collect();
    let omnibus = chi_square_yates(&rows)?;
    println!("omnibus chi2 = {:.3}, df = {}, p = {:.3e}", omnibus.statistic, omnibus.df, omnibus.p_value);
    let posthoc = bonferroni_pairwise(&table, 0.05);
    for t in &posthoc.pairs {
        println!("  {} vs {}: chi2 = {:.3}, p = {:.3e}, significant = {}", t.site_a, t.site_b, t.statistic, t.p_value, t.significant);
    }

    let newer: BTreeSet<ConceptId> = (901..=930).map(id).collect();
    let excluded: BTreeSet<ConceptId> = (931..=990).map(id).collect();
    let buckets = bucket_errors(&report.site_only_concepts, &newer, &excluded, &freqs);
    for (bucket, s) in &buckets.buckets {
        println!("  {:<22} {:>3} ({}%)", bucket.as_str(), s.count, round1(s.fraction_pct));
    }
    Ok(())
}
