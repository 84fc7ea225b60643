use std::cmp::Ordering;
use std::ops::Add;

use serde::{Deserialize, Serialize};

/// A nonnegative number stored as its natural logarithm; `-∞` encodes zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogScalar {
    log_value: f64,
}

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar { log_value: f64::NEG_INFINITY };
    pub const ONE: LogScalar = LogScalar { log_value: 0.0 };

    pub fn from_log(log_value: f64) -> Self {
        debug_assert!(!log_value.is_nan());
        Self { log_value }
    }

    pub fn from_value(value: f64) -> Self {
        debug_assert!(value >= 0.0);
        Self { log_value: value.ln() }
    }

    pub fn log(self) -> f64 {
        self.log_value
    }

    /// The plain value; `inf` once it leaves double range.
    pub fn value(self) -> f64 {
        self.log_value.exp()
    }
}

impl Add for LogScalar {
    type Output = LogScalar;

    fn add(self, rhs: LogScalar) -> LogScalar {
        let (hi, lo) = if self.log_value >= rhs.log_value {
            (self.log_value, rhs.log_value)
        } else {
            (rhs.log_value, self.log_value)
        };
        if lo == f64::NEG_INFINITY || hi == f64::INFINITY {
            return LogScalar::from_log(hi);
        }
        LogScalar::from_log(hi + (lo - hi).exp().ln_1p())
    }
}

impl PartialOrd for LogScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.log_value.partial_cmp(&other.log_value)
    }
}
