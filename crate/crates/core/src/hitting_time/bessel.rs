//! Modified Bessel function of the first kind, integer order, in log domain.
//!
//! Three regimes:
//!
//! * power series summed around its largest term, for `x` up to about `2k²`
//!   when `k < DEBYE_MIN_ORDER`;
//! * Hankel's large-argument expansion of `e^{-x} I_k(x)` beyond that;
//! * Debye's uniform expansion for `k ≥ DEBYE_MIN_ORDER`, any `x > 0`.
//!
//! All three return `log(I_k(x) e^{-x})` directly so the exponential factor
//! never has to be formed or cancelled.

use std::f64::consts::PI;
use std::sync::OnceLock;

use statrs::function::gamma::ln_gamma;

const DEBYE_MIN_ORDER: u32 = 30;
const DEBYE_TERMS: usize = 13;

/// `log I_k(x)`; `-∞` when `I_k(x) = 0` (that is `x = 0`, `k ≥ 1`).
pub fn bessel_i_log(k: u32, x: f64) -> f64 {
    bessel_i_log_scaled(k, x) + x
}

/// `log(I_k(x) e^{-x})`, finite for every `x > 0` including `x` near `f64::MAX`.
pub fn bessel_i_log_scaled(k: u32, x: f64) -> f64 {
    assert!(x >= 0.0, "bessel_i_log: negative argument {x}");
    if x == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if k >= DEBYE_MIN_ORDER {
        return debye_scaled(k, x);
    }
    let kf = f64::from(k);
    if x <= 2.0 * kf * kf + 60.0 {
        series_scaled(k, x)
    } else {
        hankel_scaled(k, x)
    }
}

/// Sum of `(x/2)^{2j+k} / (j! (j+k)!)` normalised by its peak term.
fn series_scaled(k: u32, x: f64) -> f64 {
    let kf = f64::from(k);
    let half = 0.5 * x;
    let log_half = half.ln();
    let quarter_sq = half * half;
    // peak index of the terms: j(j+k) = (x/2)²
    let peak = (0.5 * (-kf + (kf * kf + x * x).sqrt())).floor().max(0.0);
    let log_peak = (2.0 * peak + kf) * log_half - ln_gamma(peak + 1.0) - ln_gamma(peak + kf + 1.0);

    let mut sum = 1.0;
    let mut term = 1.0;
    let mut j = peak;
    while j > 0.0 {
        term *= j * (j + kf) / quarter_sq;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        j -= 1.0;
    }
    term = 1.0;
    j = peak + 1.0;
    loop {
        term *= quarter_sq / (j * (j + kf));
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        j += 1.0;
    }
    log_peak + sum.ln() - x
}

/// `e^{-x} I_k(x) ~ (2πx)^{-1/2} Σ (-1)^m a_m(k) / x^m`.
fn hankel_scaled(k: u32, x: f64) -> f64 {
    let mu = 4.0 * f64::from(k) * f64::from(k);
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for m in 1..200u32 {
        let odd = f64::from(2 * m - 1);
        term *= -(mu - odd * odd) / (8.0 * f64::from(m) * x);
        if term.abs() >= prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if prev < 1e-17 * sum.abs() {
            break;
        }
    }
    -0.5 * (2.0 * PI * x).ln() + sum.ln()
}

/// Debye polynomials `u_k(t)` as coefficient vectors in `t`, generated by
/// `u_{k+1} = ½t²(1−t²)u_k' + ⅛∫₀ᵗ(1−5s²)u_k(s)ds`.
fn debye_polynomials() -> &'static [Vec<f64>] {
    static POLYS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    POLYS.get_or_init(|| {
        let mut polys = vec![vec![1.0]];
        for _ in 1..DEBYE_TERMS {
            let u = polys.last().unwrap();
            let mut next = vec![0.0; u.len() + 3];
            // ½ t² (1 − t²) u'(t)
            for (i, &c) in u.iter().enumerate().skip(1) {
                let d = c * i as f64;
                next[i + 1] += 0.5 * d;
                next[i + 3] -= 0.5 * d;
            }
            // ⅛ ∫₀ᵗ (1 − 5s²) u(s) ds
            for (i, &c) in u.iter().enumerate() {
                next[i + 1] += 0.125 * c / (i + 1) as f64;
                next[i + 3] -= 0.625 * c / (i + 3) as f64;
            }
            while next.last() == Some(&0.0) {
                next.pop();
            }
            polys.push(next);
        }
        polys
    })
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

fn debye_scaled(k: u32, x: f64) -> f64 {
    let nu = f64::from(k);
    let h = nu.hypot(x);
    let p = nu / h;
    // νη − x with η = √(1+z²) + log(z / (1 + √(1+z²))), z = x/ν
    let eta_minus_x = nu * nu / (h + x) + nu * (x / (nu + h)).ln();
    let mut sum = 0.0;
    let mut scale = 1.0;
    for u in debye_polynomials() {
        sum += horner(u, p) * scale;
        scale /= nu;
    }
    eta_minus_x - 0.5 * (2.0 * PI * h).ln() + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct summation of Σ_j (x/2)^{2j+k}/(j!(j+k)!) in plain floating point.
    fn series_oracle(k: u32, x: f64) -> f64 {
        let mut term = (0.5 * x).powi(k as i32) / (1..=k).map(f64::from).product::<f64>();
        let mut sum = term;
        for j in 1..2000u32 {
            term *= 0.25 * x * x / (f64::from(j) * f64::from(j + k));
            sum += term;
            if term < 1e-20 * sum {
                break;
            }
        }
        sum.ln()
    }

    #[test]
    fn known_values() {
        assert_eq!(bessel_i_log(0, 0.0), 0.0);
        assert_eq!(bessel_i_log(3, 0.0), f64::NEG_INFINITY);
        // I_1(2) = 1.590636854637329...
        assert!((bessel_i_log(1, 2.0) - 1.590_636_854_637_329_f64.ln()).abs() < 1e-13);
        // I_0(1) = 1.266065877752008...
        assert!((bessel_i_log(0, 1.0) - 1.266_065_877_752_008_4_f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn debye_polynomials_match_tabulated() {
        let u = debye_polynomials();
        let t = 0.37_f64;
        let u1 = (3.0 * t - 5.0 * t.powi(3)) / 24.0;
        let u2 = (81.0 * t.powi(2) - 462.0 * t.powi(4) + 385.0 * t.powi(6)) / 1152.0;
        let u3 = (30375.0 * t.powi(3) - 369603.0 * t.powi(5) + 765765.0 * t.powi(7) - 425425.0 * t.powi(9)) / 414720.0;
        assert!((horner(&u[1], t) - u1).abs() < 1e-15);
        assert!((horner(&u[2], t) - u2).abs() < 1e-15);
        assert!((horner(&u[3], t) - u3).abs() < 1e-15);
    }

    #[test]
    fn agrees_with_direct_series_across_regimes() {
        for &k in &[0u32, 1, 2, 5, 12, 29, 30, 31, 45, 64] {
            for &x in &[0.01, 0.5, 1.0, 3.0, 10.0, 40.0, 61.0, 100.0, 250.0, 600.0] {
                let oracle = series_oracle(k, x);
                if !oracle.is_finite() {
                    continue;
                }
                let got = bessel_i_log(k, x);
                let tol = 1e-10 * oracle.abs().max(1.0);
                assert!((got - oracle).abs() < tol, "k={k} x={x}: {got} vs {oracle}");
            }
        }
    }

    #[test]
    fn regime_boundaries_are_continuous() {
        for k in [1u32, 2, 5, 20, 29] {
            let b = 2.0 * f64::from(k * k) + 60.0;
            let lo = series_scaled(k, b);
            let hi = hankel_scaled(k, b);
            assert!((lo - hi).abs() < 1e-11, "k={k}: {lo} vs {hi}");
        }
        for &x in &[1.0, 50.0, 2000.0] {
            let d = debye_scaled(30, x);
            let s = series_scaled(30, x);
            assert!((d - s).abs() < 1e-11, "x={x}: {d} vs {s}");
        }
    }

    #[test]
    fn huge_arguments_do_not_overflow() {
        for k in [0u32, 1, 5, 100, 10_000] {
            let v = bessel_i_log_scaled(k, 1e300);
            let expected = -0.5 * (2.0 * PI * 1e300_f64).ln();
            assert!((v - expected).abs() < 1e-9, "k={k}: {v}");
        }
    }
}
