use rand_distr::{Distribution, Poisson};

use crate::hitting_time::{normal_quantile, DistanceReport};
use crate::rng::{stream, Purpose};
use crate::stats::KOLMOGOROV_SD;
use crate::{Error, Result};

/// Number of reference quantiles at which the distance is evaluated.
pub const POISSON_GRID_POINTS: usize = 200;

/// `ν − ν'` for independent Poisson(κ) pairs.
pub fn poisson_differences(kappa: f64, n_samples: usize, seed: u64) -> Result<Vec<i64>> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::invalid(format!("kappa must be positive and finite, got {kappa}")));
    }
    let pois = Poisson::new(kappa).map_err(|e| Error::invalid(e.to_string()))?;
    let mut rng = stream(seed, kappa.to_bits(), Purpose::Sampler);
    Ok((0..n_samples)
        .map(|_| {
            let a: f64 = pois.sample(&mut rng);
            let b: f64 = pois.sample(&mut rng);
            a as i64 - b as i64
        })
        .collect())
}

/// Largest gap between the empirical CDF of `(ν − ν')/√κ` and `Φ(u/√2)`
/// over the 200 points `u_i = √2 Φ⁻¹((i + ½)/200)`.
pub fn poisson_diff_distance(kappa: f64, n_samples: usize, seed: u64) -> Result<DistanceReport> {
    if n_samples == 0 {
        return Err(Error::invalid("n_samples must be positive"));
    }
    let mut d = poisson_differences(kappa, n_samples, seed)?;
    d.sort_unstable();
    let root = kappa.sqrt();
    let n = n_samples as f64;
    let ks_statistic = (0..POISSON_GRID_POINTS)
        .map(|i| {
            let p = (i as f64 + 0.5) / POISSON_GRID_POINTS as f64;
            let u = std::f64::consts::SQRT_2 * normal_quantile(p);
            let below = d.partition_point(|&v| v as f64 <= u * root) as f64 / n;
            (below - p).abs()
        })
        .fold(0.0, f64::max);
    Ok(DistanceReport {
        label: format!("poisson-diff kappa={kappa}"),
        k: None,
        kappa: Some(kappa),
        n_samples,
        ks_statistic,
        mc_stderr: KOLMOGOROV_SD / n.sqrt(),
        seed,
        budget_retries: 0,
    })
}
