//! Reductions and test statistics shared by the estimators.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pairwise (cascade) summation; the result does not depend on how the
/// input was produced, only on its order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Sample mean, standard deviation and standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub stderr: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self { n, mean: f64::NAN, std_dev: f64::NAN, stderr: f64::NAN };
        }
        let mean = pairwise_sum(xs) / n as f64;
        let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = if n > 1 { pairwise_sum(&dev) / (n - 1) as f64 } else { 0.0 };
        let std_dev = var.sqrt();
        Self { n, mean, std_dev, stderr: std_dev / (n as f64).sqrt() }
    }
}

/// Empirical quantile by linear interpolation between order statistics
/// (type 7). `sorted` must be ascending.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn median(xs: &[f64]) -> f64 {
    quantile_sorted(&sorted(xs), 0.5)
}

/// Fraction of `sorted` that is `<= x`.
pub fn ecdf_sorted(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64
}

/// One-sample Kolmogorov–Smirnov statistic `sup |F_n − F|` for continuous
/// `cdf`. `sorted` must be ascending.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |acc: f64, (i, &x)| {
        let f = cdf(x);
        let above = (i as f64 + 1.0) / n - f;
        let below = f - i as f64 / n;
        acc.max(above).max(below)
    })
}

/// Standard deviation of `√n · D_n` for the limiting Kolmogorov law,
/// `√(π²/12 − (π/2) ln² 2)`.
pub const KOLMOGOROV_SD: f64 = 0.260_332_871_462_412_7;

/// Asymptotic p-value `P(D_n ≥ d)` of the one-sample KS statistic, with
/// Stephens' small-sample correction.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let x = (sn + 0.12 + 0.11 / sn) * d;
    if x < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * x * x).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Standard error of a sample median, read off the order statistics at
/// `½ ± ½/√n` (one binomial standard error either side).
pub fn median_stderr(sorted: &[f64]) -> f64 {
    let half_width = 0.5 / (sorted.len() as f64).sqrt();
    0.5 * (quantile_sorted(sorted, 0.5 + half_width) - quantile_sorted(sorted, 0.5 - half_width))
}

/// Chi-square test of homogeneity for a table of counts (rows are samples,
/// columns categories). Columns that are empty in every row are dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

pub fn chi_square_homogeneity(table: &[Vec<u64>]) -> ChiSquareTest {
    let rows = table.len();
    let cols = table.first().map_or(0, Vec::len);
    let row_tot: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_tot: Vec<f64> = (0..cols).map(|c| table.iter().map(|r| r[c]).sum::<u64>() as f64).collect();
    let grand: f64 = row_tot.iter().sum();
    let live: Vec<usize> = (0..cols).filter(|&c| col_tot[c] > 0.0).collect();
    let mut statistic = 0.0;
    for (r, row) in table.iter().enumerate() {
        for &c in &live {
            let expected = row_tot[r] * col_tot[c] / grand;
            let d = row[c] as f64 - expected;
            statistic += d * d / expected;
        }
    }
    let dof = (rows.saturating_sub(1)) * live.len().saturating_sub(1);
    let p_value = if dof == 0 { 1.0 } else { ChiSquared::new(dof as f64).map(|d| d.sf(statistic)).unwrap_or(f64::NAN) };
    ChiSquareTest { statistic, dof, p_value }
}

/// Goodness of fit of observed counts to given probabilities.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> ChiSquareTest {
    let n: f64 = observed.iter().sum::<u64>() as f64;
    let statistic = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = n * p;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dof = probs.len().saturating_sub(1);
    let p_value = ChiSquared::new(dof as f64).map(|d| d.sf(statistic)).unwrap_or(f64::NAN);
    ChiSquareTest { statistic, dof, p_value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn summary_basic() {
        let s = Summary::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.std_dev - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((s.stderr - s.std_dev / 2.0).abs() < 1e-15);
    }

    #[test]
    fn ks_of_uniform_grid() {
        let xs: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
        assert!((ks_statistic(&xs, |x| x) - 0.05).abs() < 1e-12);
    }

    #[test]
    fn kolmogorov_tail_values() {
        // P(K > 1.36) ≈ 0.049, P(K > 1.63) ≈ 0.0098 for the limiting law
        let n = 1_000_000;
        let d = |x: f64| x / (n as f64).sqrt();
        assert!((ks_p_value(d(1.358), n) - 0.05).abs() < 2e-3);
        assert!((ks_p_value(d(1.628), n) - 0.01).abs() < 5e-4);
        assert_eq!(ks_p_value(0.0, 10), 1.0);
        let pi = std::f64::consts::PI;
        let sd = (pi * pi / 12.0 - pi / 2.0 * 2f64.ln().powi(2)).sqrt();
        assert!((sd - KOLMOGOROV_SD).abs() < 1e-15);
    }

    #[test]
    fn chi_square_identical_rows() {
        let t = chi_square_homogeneity(&[vec![10, 20, 0, 30], vec![10, 20, 0, 30]]);
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.dof, 2);
        assert!((t.p_value - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn pairwise_sum_matches_naive(xs in proptest::collection::vec(-1e6f64..1e6, 0..500)) {
            let naive: f64 = xs.iter().sum();
            prop_assert!((pairwise_sum(&xs) - naive).abs() <= 1e-6 * (1.0 + naive.abs()));
        }

        #[test]
        fn ks_in_unit_interval(xs in proptest::collection::vec(0f64..1.0, 1..200)) {
            let d = ks_statistic(&sorted(&xs), |x| x);
            prop_assert!((0.0..=1.0).contains(&d));
        }

        #[test]
        fn quantile_is_monotone(xs in proptest::collection::vec(-10f64..10.0, 1..100), p in 0f64..1.0, q in 0f64..1.0) {
            let s = sorted(&xs);
            let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
            prop_assert!(quantile_sorted(&s, lo) <= quantile_sorted(&s, hi));
        }
    }
}
