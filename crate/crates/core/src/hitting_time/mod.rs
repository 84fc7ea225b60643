//! Emptying time ζ(k) of a critical M/M/1 queue (arrival rate = service
//! rate = λ) started from `k` customers, and the standard Lévy law that
//! `2λζ(k)/k²` converges to.

mod bessel;
mod density;
mod levy;
mod normal;
mod sampler;

pub use bessel::{bessel_i_log, bessel_i_log_scaled};
pub use density::{zeta_density, zeta_survival, zeta_survival_k, zeta_total_mass};
pub use levy::{levy_cdf, levy_pdf, levy_sf, quarter_integrand, quarter_quadrature, LevyLaw};
pub use normal::{normal_cdf, normal_pdf, normal_quantile, normal_sf, normal_sf_inv};
pub use sampler::{
    ks_distance_to_levy, sample_zeta_levy, sample_zeta_walk, CriticalQueueParams, DistanceReport, HittingSampler,
    SamplingMethod, DEFAULT_AUTO_THRESHOLD,
};
