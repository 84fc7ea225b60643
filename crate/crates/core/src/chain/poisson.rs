use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

/// Largest Poisson mean for which integer counts are exact in `f64`.
pub const EXACT_MEAN_LIMIT: f64 = 9_007_199_254_740_992.0;

/// Above this mean the exact sampler is replaced by a rounded Gaussian.
pub const GAUSSIAN_MEAN_THRESHOLD: f64 = 1e6;

/// A Poisson draw and whether the Gaussian approximation produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoissonDraw {
    pub value: u64,
    pub approximate: bool,
}

/// Poisson(`mean`) for `0 ≤ mean ≤ EXACT_MEAN_LIMIT`.
///
/// Exact up to [`GAUSSIAN_MEAN_THRESHOLD`]; above it `round(mean + √mean·Z)`
/// clamped at zero, whose total-variation error is `O(mean^{-1/2})`.
pub fn sample_poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> PoissonDraw {
    debug_assert!((0.0..=EXACT_MEAN_LIMIT).contains(&mean));
    if mean <= 0.0 {
        return PoissonDraw { value: 0, approximate: false };
    }
    if mean <= GAUSSIAN_MEAN_THRESHOLD {
        let v: f64 = Poisson::new(mean).expect("positive finite mean").sample(rng);
        return PoissonDraw { value: v as u64, approximate: false };
    }
    let z: f64 = StandardNormal.sample(rng);
    let v = (mean + mean.sqrt() * z).round().max(0.0);
    PoissonDraw { value: v as u64, approximate: true }
}
