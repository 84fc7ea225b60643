use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::levy::{levy_cdf, LevyLaw};
use crate::rng::{stream, Purpose};
use crate::stats::{ks_statistic, sorted, KOLMOGOROV_SD};
use crate::{Error, Result};

/// Below or at this initial queue length `Auto` uses the exact walk.
pub const DEFAULT_AUTO_THRESHOLD: u64 = 64;

/// Jump budget used by the distance estimators. The chance that a walk from
/// `k` needs more jumps than this is about `k · 2.5e-8`.
const KS_STEP_BUDGET: u64 = 1_000_000_000_000_000;

/// Arrival rate, equal to the service rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalQueueParams {
    lambda: f64,
}

impl CriticalQueueParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(format!("lambda must be positive and finite, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMethod {
    /// Simulate the rate-2λ symmetric walk until it hits 0.
    ExactWalk,
    /// `k² S / (2λ)` with `S` standard Lévy; Kolmogorov error `O(1/k)`.
    LevyApprox,
    /// `ExactWalk` for `k <= auto_threshold_k`, `LevyApprox` above.
    Auto,
}

/// Sampler for ζ(k).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HittingSampler {
    pub params: CriticalQueueParams,
    pub method: SamplingMethod,
    pub auto_threshold_k: u64,
    /// Maximum number of walk jumps; `None` means unbounded.
    pub step_budget: Option<u64>,
    /// Give up once the walk's elapsed time exceeds this; `None` means
    /// unbounded.
    #[serde(default)]
    pub time_budget: Option<f64>,
}

impl HittingSampler {
    pub fn new(params: CriticalQueueParams, method: SamplingMethod) -> Self {
        Self { params, method, auto_threshold_k: DEFAULT_AUTO_THRESHOLD, step_budget: None, time_budget: None }
    }

    pub fn auto(params: CriticalQueueParams) -> Self {
        Self::new(params, SamplingMethod::Auto)
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.step_budget = Some(budget);
        self
    }

    pub fn with_time_budget(mut self, limit: f64) -> Self {
        self.time_budget = Some(limit);
        self
    }

    pub fn with_threshold(mut self, k: u64) -> Self {
        self.auto_threshold_k = k;
        self
    }

    /// The method actually used for an initial queue of `k`.
    pub fn resolve(&self, k: u64) -> SamplingMethod {
        match self.method {
            SamplingMethod::Auto if k <= self.auto_threshold_k => SamplingMethod::ExactWalk,
            SamplingMethod::Auto => SamplingMethod::LevyApprox,
            m => m,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, k: u64, rng: &mut R) -> Result<f64> {
        if k == 0 {
            return Ok(0.0);
        }
        match self.resolve(k) {
            SamplingMethod::LevyApprox => Ok(sample_zeta_levy(k, self, rng)),
            _ => sample_zeta_walk(k, self, rng),
        }
    }
}

/// Exact draw of ζ(k).
///
/// The embedded jump chain is simulated exactly. From height `z ≥ 2` the walk
/// cannot reach 0 within `z − 1` jumps, so those jumps are taken as one
/// binomial block; from height 1 a single fair jump decides. The holding
/// times are i.i.d. Exp(2λ), so their total over `N` jumps is drawn as one
/// Gamma(N, 1/(2λ)) variate.
///
/// With a time budget the holding time of each block is drawn as it is
/// taken, so the walk can stop as soon as the budget is passed.
pub fn sample_zeta_walk<R: Rng + ?Sized>(k: u64, sampler: &HittingSampler, rng: &mut R) -> Result<f64> {
    if k == 0 {
        return Ok(0.0);
    }
    if let Some(limit) = sampler.time_budget {
        return walk_with_time_budget(k, sampler, limit, rng);
    }
    let rate = 2.0 * sampler.params.lambda();
    let budget = sampler.step_budget.unwrap_or(u64::MAX);
    let mut height = k;
    let mut jumps: u64 = 0;
    while height > 0 {
        if jumps >= budget {
            let partial_time = gamma_total(jumps, rate, rng);
            return Err(Error::BudgetExceeded { steps_taken: jumps, partial_time });
        }
        if height == 1 {
            jumps += 1;
            height = if rng.random::<bool>() { 0 } else { 2 };
        } else {
            let block = height - 1;
            let ups = Binomial::new(block, 0.5).expect("valid binomial").sample(rng);
            jumps = jumps.saturating_add(block);
            height = 1 + 2 * ups;
        }
    }
    Ok(gamma_total(jumps, rate, rng))
}

fn walk_with_time_budget<R: Rng + ?Sized>(k: u64, sampler: &HittingSampler, limit: f64, rng: &mut R) -> Result<f64> {
    let rate = 2.0 * sampler.params.lambda();
    let budget = sampler.step_budget.unwrap_or(u64::MAX);
    let mut height = k;
    let mut jumps: u64 = 0;
    let mut time = 0.0;
    while height > 0 {
        if jumps >= budget || time > limit {
            return Err(Error::BudgetExceeded { steps_taken: jumps, partial_time: time });
        }
        let block = height.max(2) - 1;
        time += gamma_total(block, rate, rng);
        jumps += block;
        height = if height == 1 {
            if rng.random::<bool>() {
                0
            } else {
                2
            }
        } else {
            1 + 2 * Binomial::new(block, 0.5).expect("valid binomial").sample(rng)
        };
    }
    if time > limit {
        return Err(Error::BudgetExceeded { steps_taken: jumps, partial_time: time });
    }
    Ok(time)
}

fn gamma_total<R: Rng + ?Sized>(jumps: u64, rate: f64, rng: &mut R) -> f64 {
    if jumps == 0 {
        return 0.0;
    }
    Gamma::new(jumps as f64, rate.recip()).expect("valid gamma").sample(rng)
}

/// `k² S / (2λ)` with `S` standard Lévy.
pub fn sample_zeta_levy<R: Rng + ?Sized>(k: u64, sampler: &HittingSampler, rng: &mut R) -> f64 {
    let kf = k as f64;
    kf * kf * LevyLaw.sample(rng) / (2.0 * sampler.params.lambda())
}

/// Kolmogorov distance between an empirical law and a reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    pub n_samples: usize,
    pub ks_statistic: f64,
    /// Sampling standard deviation of the statistic, `0.2603/√n` (the
    /// spread of the limiting Kolmogorov law).
    pub mc_stderr: f64,
    pub seed: u64,
    /// Draws discarded because they exceeded the walk's jump budget.
    #[serde(default)]
    pub budget_retries: u64,
}

/// KS distance of `{2λ ζ_i(k) / k²}` (exact walk draws) to the standard
/// Lévy law.
pub fn ks_distance_to_levy(k: u64, lambda: f64, n_samples: usize, seed: u64) -> Result<DistanceReport> {
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    if n_samples < 1000 {
        return Err(Error::invalid(format!("need at least 1000 samples, got {n_samples}")));
    }
    let params = CriticalQueueParams::new(lambda)?;
    let sampler = HittingSampler::new(params, SamplingMethod::ExactWalk).with_budget(KS_STEP_BUDGET);
    let mut rng = stream(seed, k, Purpose::Sampler);
    let scale = 2.0 * lambda / (k as f64 * k as f64);
    let mut draws = Vec::with_capacity(n_samples);
    let mut retries = 0;
    while draws.len() < n_samples {
        match sample_zeta_walk(k, &sampler, &mut rng) {
            Ok(t) => draws.push(t * scale),
            Err(Error::BudgetExceeded { .. }) => retries += 1,
            Err(e) => return Err(e),
        }
    }
    let draws = sorted(&draws);
    Ok(DistanceReport {
        label: format!("levy-ks k={k}"),
        k: Some(k),
        kappa: None,
        n_samples,
        ks_statistic: ks_statistic(&draws, levy_cdf),
        mc_stderr: KOLMOGOROV_SD / (n_samples as f64).sqrt(),
        seed,
        budget_retries: retries,
    })
}
