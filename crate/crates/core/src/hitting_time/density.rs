//! Density and tail of the critical M/M/1 emptying time ζ(k).

use std::f64::consts::PI;

use super::bessel::bessel_i_log_scaled;
use crate::quadrature::integrate;

/// `f_k(u) = (k/u) I_k(2λu) e^{-2λu}`, evaluated in log domain.
pub fn zeta_density(k: u32, lambda: f64, u: f64) -> f64 {
    if u <= 0.0 || k == 0 {
        return 0.0;
    }
    let x = 2.0 * lambda * u;
    (f64::from(k).ln() - u.ln() + bessel_i_log_scaled(k, x)).exp()
}

/// Large-`u` expansion of `P(ζ(k) > u)` through its `u^{-3/2}` term, with an
/// estimate of the first neglected term.
///
/// The survival function is `e^{-x}(I_0 + 2Σ_{j<k} I_j + I_k)(x)` at
/// `x = 2λu`; each summand contributes Hankel's expansion.
fn tail_expansion(k: u32, lambda: f64, u: f64) -> (f64, f64) {
    let x = 2.0 * lambda * u;
    let mut first = 0.0;
    let mut second = 0.0;
    let mut count = 0.0;
    for j in 0..=k {
        let weight = if j == 0 || j == k { 1.0 } else { 2.0 };
        let mu = 4.0 * f64::from(j) * f64::from(j);
        count += weight;
        first += weight * (mu - 1.0) / 8.0;
        second += weight * (mu - 1.0) * (mu - 9.0) / 128.0;
    }
    let lead = (2.0 * PI * x).sqrt().recip();
    (lead * (count - first / x), lead * (second / (x * x)).abs())
}

/// Point beyond which the tail expansion is trusted to `1e-10`.
fn tail_cut(k: u32, lambda: f64) -> f64 {
    let (_, err_at_one) = tail_expansion(k, lambda, 1.0 / (2.0 * lambda));
    // error scales as x^{-5/2}
    let x_cut = (err_at_one / 1e-10).powf(0.4).max(200.0);
    x_cut / (2.0 * lambda)
}

fn integrate_density(k: u32, lambda: f64, from: f64, to: f64) -> f64 {
    if to <= from {
        return 0.0;
    }
    let knee = 1.0 / lambda;
    let mut total = 0.0;
    if from < knee {
        let b = knee.min(to);
        total += integrate(|u| zeta_density(k, lambda, u), from, b, 1e-13).value;
    }
    let a = from.max(knee);
    if a < to {
        // u = e^s flattens the u^{-3/2} tail
        total += integrate(
            |s: f64| {
                let u = s.exp();
                zeta_density(k, lambda, u) * u
            },
            a.ln(),
            to.ln(),
            1e-13,
        )
        .value;
    }
    total
}

/// `P(ζ(k) > u)` by quadrature of `f_k` on `[u, u_cut]` plus the analytic
/// tail beyond `u_cut`.
pub fn zeta_survival_k(k: u32, lambda: f64, u: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    if u <= 0.0 {
        return 1.0;
    }
    let cut = tail_cut(k, lambda);
    if u >= cut {
        return tail_expansion(k, lambda, u).0.min(1.0);
    }
    let value = integrate_density(k, lambda, u, cut) + tail_expansion(k, lambda, cut).0;
    value.clamp(0.0, 1.0)
}

/// `F̄(u) = P(ζ(1) > u)`.
pub fn zeta_survival(lambda: f64, u: f64) -> f64 {
    zeta_survival_k(1, lambda, u)
}

/// `∫₀^∞ f_k(u) du`, with the same tail closure. Equals 1 up to quadrature
/// error.
pub fn zeta_total_mass(k: u32, lambda: f64) -> f64 {
    let cut = tail_cut(k, lambda);
    integrate_density(k, lambda, 0.0, cut) + tail_expansion(k, lambda, cut).0
}
