use serde::{Deserialize, Serialize};

use super::walk::{lil_from, recurrence_from, WalkSource};
use crate::stats::quantile_sorted;
use crate::{stats::sorted, Result};

/// Two-sided 0.1% normal quantile used for every calibrated band.
const Z_BAND: f64 = 3.290_526_731_491_926;

/// How the reference bands are produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSettings {
    pub seed: u64,
    pub turn_prob: f64,
    pub lil_n_max: u64,
    pub lil_reference_replicas: usize,
    /// Replica count of the run the band will be applied to.
    pub lil_test_replicas: usize,
    pub recurrence_n_max: u64,
    pub recurrence_reference_replicas: usize,
    pub recurrence_test_replicas: usize,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self {
            seed: 20_251_015,
            turn_prob: 0.25,
            lil_n_max: 100_000,
            lil_reference_replicas: 10_000,
            lil_test_replicas: 1000,
            recurrence_n_max: 10_000,
            recurrence_reference_replicas: 10_000,
            recurrence_test_replicas: 1000,
        }
    }
}

/// Bands derived from the correlated reference walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub settings: CalibrationSettings,
    /// Median of the reference running maxima.
    pub lil_reference_median: f64,
    /// Reference quantiles at `½ ∓ z·½·√(1/n_test + 1/n_ref)`: a median of
    /// `n_test` draws from the same law lands inside with probability ≈ 0.999.
    pub lil_band: [f64; 2],
    pub returns_reference_mean: f64,
    pub returns_reference_sd: f64,
    /// Reference mean minus `z` standard errors of the difference of two means.
    pub returns_lower_bound: f64,
    pub sign_change_reference: f64,
    pub sign_change_reference_stderr: f64,
}

pub fn calibrate(settings: &CalibrationSettings) -> Result<Calibration> {
    let source = WalkSource::Reference { turn_prob: settings.turn_prob };
    let lil = lil_from(source, settings.lil_n_max, settings.lil_reference_replicas, settings.seed)?;
    let maxima = sorted(&lil.running_max);
    let half_width =
        Z_BAND * 0.5 * (1.0 / settings.lil_test_replicas as f64 + 1.0 / settings.lil_reference_replicas as f64).sqrt();
    let lil_band = [quantile_sorted(&maxima, 0.5 - half_width), quantile_sorted(&maxima, 0.5 + half_width)];

    let rec =
        recurrence_from(source, settings.recurrence_n_max, settings.recurrence_reference_replicas, settings.seed)?;
    let sd = rec.returns.stderr * (rec.returns.n_replicas as f64).sqrt();
    let se_diff = sd
        * (1.0 / settings.recurrence_test_replicas as f64 + 1.0 / settings.recurrence_reference_replicas as f64).sqrt();
    Ok(Calibration {
        settings: *settings,
        lil_reference_median: lil.median,
        lil_band,
        returns_reference_mean: rec.returns.point,
        returns_reference_sd: sd,
        returns_lower_bound: rec.returns.point - Z_BAND * se_diff,
        sign_change_reference: rec.sign_change.point,
        sign_change_reference_stderr: rec.sign_change.stderr,
    })
}

impl Calibration {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_calibration_is_deterministic() {
        let s = CalibrationSettings {
            lil_n_max: 2000,
            lil_reference_replicas: 200,
            lil_test_replicas: 100,
            recurrence_n_max: 1000,
            recurrence_reference_replicas: 200,
            recurrence_test_replicas: 100,
            ..CalibrationSettings::default()
        };
        let a = calibrate(&s).unwrap();
        let b = calibrate(&s).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert!(a.lil_band[0] <= a.lil_reference_median && a.lil_reference_median <= a.lil_band[1]);
        assert!(a.returns_lower_bound < a.returns_reference_mean);
    }
}
