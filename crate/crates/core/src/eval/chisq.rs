use rayon::prelude::*;
use serde::Serialize;

use super::EvalError;

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAX_ITER: usize = 10_000;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function (Lanczos approximation, reflection below 1/2).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

fn prefactor(a: f64, x: f64) -> f64 {
    (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Lower regularized gamma P(a, x) by its power series; converges fast for x < a + 1.
fn p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * prefactor(a, x)
}

/// Upper regularized gamma Q(a, x) by its continued fraction (modified Lentz).
fn q_continued_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    prefactor(a, x) * h
}

/// Regularized upper incomplete gamma function Q(a, x) for a > 0, x ≥ 0.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "gamma_q domain: a={a}, x={x}");
    if x == 0.0 {
        return 1.0;
    }
    let q = if x < a + 1.0 {
        1.0 - p_series(a, x)
    } else {
        q_continued_fraction(a, x)
    };
    q.clamp(0.0, 1.0)
}

/// A chi-square statistic and its upper-tail p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatResult {
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
}

/// Chi-square test of independence with Yates' correction applied to every
/// cell and clamped at zero: `Σ max(|O − E| − 0.5, 0)² / E`.
pub fn chi_square_yates(table: &[Vec<u64>]) -> Result<StatResult, EvalError> {
    let r = table.len();
    let c = table.first().map_or(0, Vec::len);
    if r < 2 || c < 2 {
        return Err(EvalError::BadTable(format!("need at least 2x2, got {r}x{c}")));
    }
    if table.iter().any(|row| row.len() != c) {
        return Err(EvalError::BadTable("ragged rows".into()));
    }
    let rows: Vec<f64> = table.iter().map(|row| row.iter().sum::<u64>() as f64).collect();
    let cols: Vec<f64> = (0..c).map(|j| table.iter().map(|row| row[j]).sum::<u64>() as f64).collect();
    if rows.iter().chain(&cols).any(|&m| m == 0.0) {
        return Err(EvalError::ZeroMarginal);
    }
    let n: f64 = rows.iter().sum();
    let mut stat = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &o) in row.iter().enumerate() {
            let e = rows[i] * cols[j] / n;
            let d = ((o as f64 - e).abs() - 0.5).max(0.0);
            stat += d * d / e;
        }
    }
    let df = ((r - 1) * (c - 1)) as u32;
    Ok(StatResult {
        statistic: stat,
        df,
        p_value: gamma_q(df as f64 / 2.0, stat / 2.0),
    })
}

/// One pairwise 2×2 comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseTest {
    pub site_a: String,
    pub site_b: String,
    pub statistic: f64,
    pub p_value: f64,
    pub significant: bool,
}

/// Bonferroni-corrected post-hoc comparisons over all unordered site pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Posthoc {
    pub alpha: f64,
    /// Per-comparison threshold `alpha / C(n, 2)`.
    pub threshold: f64,
    pub pairs: Vec<PairwiseTest>,
    pub fraction_significant: f64,
}

/// Yates 2×2 test (covered, uncovered) for every site pair. A pair whose
/// table has an empty column (both sites fully covered, or neither covering
/// anything) has no evidence of difference and is reported with p = 1.
pub fn bonferroni_pairwise(sites: &[(String, u64, u64)], alpha: f64) -> Posthoc {
    let n = sites.len();
    let comparisons = n * n.saturating_sub(1) / 2;
    let threshold = if comparisons == 0 { alpha } else { alpha / comparisons as f64 };
    let index: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let pairs: Vec<PairwiseTest> = index
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&sites[i], &sites[j]);
            let table = vec![vec![a.1, a.2], vec![b.1, b.2]];
            let (statistic, p_value) = match chi_square_yates(&table) {
                Ok(r) => (r.statistic, r.p_value),
                Err(_) => (0.0, 1.0),
            };
            PairwiseTest {
                site_a: a.0.clone(),
                site_b: b.0.clone(),
                statistic,
                p_value,
                significant: p_value < threshold,
            }
        })
        .collect();
    let sig = pairs.iter().filter(|p| p.significant).count();
    Posthoc {
        alpha,
        threshold,
        fraction_significant: if pairs.is_empty() { 0.0 } else { sig as f64 / pairs.len() as f64 },
        pairs,
    }
}
