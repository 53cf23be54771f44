//! Generalizability and clinical-utility evaluation: coverage partitions,
//! chi-square tests with Yates correction, error buckets, standardized
//! phenotype risk scores and the one-sided Wilcoxon rank-sum test.

mod chisq;
mod coverage;
mod phers;
mod wilcoxon;

pub use chisq::{bonferroni_pairwise, chi_square_yates, gamma_q, ln_gamma, PairwiseTest, Posthoc, StatResult};
pub use coverage::{
    bucket_errors, partition_coverage, round1, Bucket, BucketStats, CoverageReport, ErrorBuckets,
    PartitionCounts,
};
pub use phers::{cohort_stats, phers, standardize, CohortStats, PatientScore, PhersResult, SD_KIND};
pub use wilcoxon::{wilcoxon_rank_sum_one_sided, TestMethod, WilcoxonResult, EXACT_MAX_N};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("EMPTY_SITE_DATA: no site frequencies")]
    EmptySiteData,
    #[error("ZERO_MARGINAL: contingency table has an empty row or column")]
    ZeroMarginal,
    #[error("BAD_TABLE: {0}")]
    BadTable(String),
    #[error("EMPTY_GROUP: both groups need at least one score")]
    EmptyGroup,
    #[error("TOO_FEW_PATIENTS: standardization needs at least 2 patients, got {0}")]
    TooFewPatients(usize),
    #[error("DEGENERATE_COHORT: all raw scores are equal")]
    DegenerateCohort,
}

impl EvalError {
    pub fn code(&self) -> &'static str {
        match self {
            EvalError::EmptySiteData => "EMPTY_SITE_DATA",
            EvalError::ZeroMarginal => "ZERO_MARGINAL",
            EvalError::BadTable(_) => "BAD_TABLE",
            EvalError::EmptyGroup => "EMPTY_GROUP",
            EvalError::TooFewPatients(_) => "TOO_FEW_PATIENTS",
            EvalError::DegenerateCohort => "DEGENERATE_COHORT",
        }
    }
}
