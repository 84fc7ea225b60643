//! Standard Lévy law (one-sided stable, index 1/2, location 0, scale 1).
//!
//! `F_S(u) = 2 Φ̄(u^{-1/2})`, density `(2π)^{-1/2} u^{-3/2} e^{-1/(2u)}`.
//! `S` has the law of `1/Z²` for a standard normal `Z`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use super::normal::{normal_cdf, normal_sf, normal_sf_inv};
use crate::quadrature::integrate;

/// Marker for the standard Lévy distribution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LevyLaw;

impl LevyLaw {
    pub fn cdf(&self, u: f64) -> f64 {
        levy_cdf(u)
    }

    pub fn sf(&self, u: f64) -> f64 {
        levy_sf(u)
    }

    pub fn pdf(&self, u: f64) -> f64 {
        levy_pdf(u)
    }

    /// `1/Z²` with `Z` standard normal.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        1.0 / (z * z)
    }

    /// Median, `Φ⁻¹(3/4)^{-2}`.
    pub fn median(&self) -> f64 {
        let q = normal_sf_inv(0.25);
        1.0 / (q * q)
    }
}

pub fn levy_cdf(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u.is_infinite() {
        return 1.0;
    }
    2.0 * normal_sf(u.sqrt().recip())
}

/// `1 − F_S(u) = 2Φ(u^{-1/2}) − 1`, evaluated as `1 − 2Φ̄(u^{-1/2})`.
pub fn levy_sf(u: f64) -> f64 {
    if u <= 0.0 {
        return 1.0;
    }
    if u.is_infinite() {
        return 0.0;
    }
    let w = u.sqrt().recip();
    // for tiny w, 2Φ(w) − 1 ≈ w √(2/π) loses nothing this way
    2.0 * normal_cdf(w) - 1.0
}

pub fn levy_pdf(u: f64) -> f64 {
    if u <= 0.0 || u.is_infinite() {
        return 0.0;
    }
    (2.0 * PI).sqrt().recip() * u.powf(-1.5) * (-0.5 / u).exp()
}

/// Integrand `F̄_S((Φ̄⁻¹(u))^{-2})` of the turning-probability integral,
/// built from the implemented `levy_sf` and `normal_sf_inv`.
pub fn quarter_integrand(u: f64) -> f64 {
    let q = normal_sf_inv(u);
    levy_sf(1.0 / (q * q))
}

/// `∫₀^{1/2} F̄_S((Φ̄⁻¹(u))^{-2}) du`, which equals `P(Z√S > 1) = 1/4`.
pub fn quarter_quadrature() -> f64 {
    integrate(quarter_integrand, 0.0, 0.5, 1e-13).value
}
