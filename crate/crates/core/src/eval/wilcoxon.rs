use serde::Serialize;
use statrs::function::erf::erfc;

use super::EvalError;

/// Largest combined sample size handled by exact enumeration.
pub const EXACT_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TestMethod {
    Exact,
    NormalApproximation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WilcoxonResult {
    /// Sum of case ranks (midranks for ties).
    pub rank_sum: f64,
    /// Mann-Whitney U of the cases: `rank_sum − n_case (n_case + 1) / 2`.
    pub u: f64,
    pub p_value: f64,
    pub method: TestMethod,
    pub n_case: usize,
    pub n_control: usize,
}

/// Midranks of `values`, doubled so that tied ranks stay integral.
fn doubled_midranks(values: &[f64]) -> (Vec<u64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0u64; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // ranks i+1..=j+1 averaged, times two
        let doubled = (i + 1 + j + 1) as u64;
        for &k in &order[i..=j] {
            ranks[k] = doubled;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    (ranks, ties)
}

/// Number of size-`k` subsets of `ranks` per achievable doubled rank sum.
fn subset_sum_counts(ranks: &[u64], k: usize) -> Vec<Vec<f64>> {
    let max: usize = ranks.iter().map(|&r| r as usize).sum();
    let mut dp = vec![vec![0.0f64; max + 1]; k + 1];
    dp[0][0] = 1.0;
    for &r in ranks {
        let r = r as usize;
        for size in (1..=k).rev() {
            for s in (r..=max).rev() {
                let add = dp[size - 1][s - r];
                if add != 0.0 {
                    dp[size][s] += add;
                }
            }
        }
    }
    dp
}

/// One-sided rank-sum test of "cases are stochastically greater than
/// controls". Exact over all case/control relabelings when the combined size
/// is at most [`EXACT_MAX_N`]; otherwise a normal approximation with tie
/// correction and a 0.5 continuity correction.
pub fn wilcoxon_rank_sum_one_sided(cases: &[f64], controls: &[f64]) -> Result<WilcoxonResult, EvalError> {
    let (n1, n2) = (cases.len(), controls.len());
    if n1 == 0 || n2 == 0 {
        return Err(EvalError::EmptyGroup);
    }
    let all: Vec<f64> = cases.iter().chain(controls).copied().collect();
    let n = all.len();
    let (ranks, ties) = doubled_midranks(&all);
    let doubled_w: u64 = ranks[..n1].iter().sum();
    let rank_sum = doubled_w as f64 / 2.0;
    let u = rank_sum - (n1 * (n1 + 1)) as f64 / 2.0;

    let (p_value, method) = if n <= EXACT_MAX_N {
        let dp = subset_sum_counts(&ranks, n1);
        let total: f64 = dp[n1].iter().sum();
        let upper: f64 = dp[n1][doubled_w as usize..].iter().sum();
        (upper / total, TestMethod::Exact)
    } else {
        let (n1f, n2f, nf) = (n1 as f64, n2 as f64, n as f64);
        let mean = n1f * (nf + 1.0) / 2.0;
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (nf * (nf - 1.0));
        let var = n1f * n2f / 12.0 * ((nf + 1.0) - tie_term);
        let p = if var <= 0.0 {
            1.0
        } else {
            let z = (rank_sum - mean - 0.5) / var.sqrt();
            0.5 * erfc(z / std::f64::consts::SQRT_2)
        };
        (p, TestMethod::NormalApproximation)
    };
    Ok(WilcoxonResult {
        rank_sum,
        u,
        p_value: p_value.clamp(0.0, 1.0),
        method,
        n_case: n1,
        n_control: n2,
    })
}
