use std::io::Read;
use std::path::Path;

use super::{open, IngestError, LoadReport, Tsv};
use crate::model::ConceptId;

/// Counts below this are raised to it; small counts are suppressed at source.
pub const PREVALENCE_FLOOR: u64 = 100;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SiteFrequency {
    pub site_id: String,
    pub concept_id: ConceptId,
    pub record_count: u64,
}

/// Parses `site_id concept_id record_count`, flooring counts and reporting
/// how many were raised.
pub fn read_prevalence<R: Read>(path: &str, input: R) -> Result<(Vec<SiteFrequency>, LoadReport), IngestError> {
    let mut tsv = Tsv::new(path, input, &["site_id", "concept_id", "record_count"])?;
    let (s, c, n) = (tsv.col("site_id"), tsv.col("concept_id"), tsv.col("record_count"));
    let path = tsv.path.clone();
    let bad = |line, message: String| IngestError::MalformedRow {
        path: path.clone(),
        line,
        message,
    };
    let mut out = Vec::new();
    let mut report = LoadReport::default();
    for row in tsv.rows() {
        let row = row?;
        let site = row.get(s);
        if site.is_empty() {
            return Err(bad(row.line, "empty site_id".into()));
        }
        let concept_id: ConceptId = row
            .get(c)
            .parse()
            .map_err(|e| bad(row.line, format!("concept_id: {e}")))?;
        let count: u64 = row
            .get(n)
            .parse()
            .map_err(|e| bad(row.line, format!("record_count {:?}: {e}", row.get(n))))?;
        let record_count = if count < PREVALENCE_FLOOR {
            report.floored += 1;
            PREVALENCE_FLOOR
        } else {
            count
        };
        out.push(SiteFrequency {
            site_id: site.to_string(),
            concept_id,
            record_count,
        });
    }
    Ok((out, report))
}

pub fn load_prevalence(path: &Path) -> Result<(Vec<SiteFrequency>, LoadReport), IngestError> {
    read_prevalence(&path.display().to_string(), open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(count: &str) -> (u64, usize) {
        let text = format!("site_id\tconcept_id\trecord_count\nsiteA\t123\t{count}\n");
        let (rows, report) = read_prevalence("p.tsv", text.as_bytes()).unwrap();
        (rows[0].record_count, report.floored)
    }

    #[test]
    fn floor_applied_below_100() {
        assert_eq!(one("40"), (100, 1));
        assert_eq!(one("0"), (100, 1));
    }

    #[test]
    fn boundary_and_large_unchanged() {
        assert_eq!(one("100"), (100, 0));
        assert_eq!(one("544618"), (544618, 0));
        assert_eq!(one("1460000000"), (1_460_000_000, 0));
    }

    #[test]
    fn malformed_count() {
        let e = read_prevalence("p.tsv", "site_id\tconcept_id\trecord_count\nA\t1\t-3\n".as_bytes()).unwrap_err();
        assert_eq!((e.code(), e.line()), ("MALFORMED_ROW", Some(2)));
    }
}
