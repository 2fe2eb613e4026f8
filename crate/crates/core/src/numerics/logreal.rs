use std::fmt;
use std::ops::{Add, Div, Mul};

/// A nonnegative real stored as its natural logarithm; zero is `-inf`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogReal(f64);

impl LogReal {
    pub const ZERO: LogReal = LogReal(f64::NEG_INFINITY);
    pub const ONE: LogReal = LogReal(0.0);

    pub fn from_ln(ln: f64) -> Self {
        debug_assert!(!ln.is_nan(), "NaN log-magnitude");
        LogReal(ln)
    }

    /// Panics if `value` is negative or NaN.
    pub fn from_value(value: f64) -> Self {
        assert!(value >= 0.0, "LogReal holds nonnegative magnitudes only, got {value}");
        LogReal(value.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// `self^k`; `0^0 = 1`.
    pub fn pow(self, k: u64) -> Self {
        if k == 0 {
            LogReal::ONE
        } else if self.is_zero() {
            LogReal::ZERO
        } else {
            LogReal(self.0 * k as f64)
        }
    }
}

impl Mul for LogReal {
    type Output = LogReal;
    fn mul(self, rhs: LogReal) -> LogReal {
        if self.is_zero() || rhs.is_zero() {
            LogReal::ZERO
        } else {
            LogReal(self.0 + rhs.0)
        }
    }
}

impl Div for LogReal {
    type Output = LogReal;
    fn div(self, rhs: LogReal) -> LogReal {
        assert!(!rhs.is_zero(), "division by a zero LogReal");
        if self.is_zero() {
            LogReal::ZERO
        } else {
            LogReal(self.0 - rhs.0)
        }
    }
}

impl Add for LogReal {
    type Output = LogReal;
    fn add(self, rhs: LogReal) -> LogReal {
        LogReal(log_add_exp(self.0, rhs.0))
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({})", self.0)
    }
}

#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// Max-shifted sum. `-inf` exactly when every input is `-inf` (or the input is empty).
pub fn logsumexp<I: IntoIterator<Item = LogReal>>(values: I) -> LogReal {
    let values: Vec<f64> = values.into_iter().map(LogReal::ln).collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return LogReal::ZERO;
    }
    if max == f64::INFINITY {
        return LogReal(f64::INFINITY);
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    LogReal(max + sum.ln())
}

/// Running log-space accumulator: the represented total is `exp(shift) * scaled`.
///
/// Merging two accumulators depends only on their contents, so a fixed merge
/// order gives a result independent of how the work was partitioned.
#[derive(Clone, Debug)]
pub struct LogAccumulator {
    shift: f64,
    scaled: f64,
    /// Companion sums carried with the same shift (e.g. weighted expectations).
    moments: Vec<f64>,
}

impl LogAccumulator {
    pub fn new(num_moments: usize) -> Self {
        LogAccumulator {
            shift: f64::NEG_INFINITY,
            scaled: 0.0,
            moments: vec![0.0; num_moments],
        }
    }

    /// Adds a term `exp(log_term)` together with `exp(log_term) * values[i]` for each moment.
    pub fn push(&mut self, log_term: f64, values: &[f64]) {
        if log_term == f64::NEG_INFINITY {
            return;
        }
        if log_term > self.shift {
            let factor = (self.shift - log_term).exp();
            self.scaled *= factor;
            self.moments.iter_mut().for_each(|m| *m *= factor);
            self.shift = log_term;
        }
        let w = (log_term - self.shift).exp();
        self.scaled += w;
        for (m, v) in self.moments.iter_mut().zip(values) {
            *m += w * v;
        }
    }

    pub fn merge(&mut self, other: &LogAccumulator) {
        if other.shift == f64::NEG_INFINITY {
            return;
        }
        if other.shift > self.shift {
            let factor = (self.shift - other.shift).exp();
            self.scaled = self.scaled * factor + other.scaled;
            for (m, o) in self.moments.iter_mut().zip(&other.moments) {
                *m = *m * factor + o;
            }
            self.shift = other.shift;
        } else {
            let factor = (other.shift - self.shift).exp();
            self.scaled += other.scaled * factor;
            for (m, o) in self.moments.iter_mut().zip(&other.moments) {
                *m += o * factor;
            }
        }
    }

    pub fn total(&self) -> LogReal {
        if self.shift == f64::NEG_INFINITY {
            LogReal::ZERO
        } else {
            LogReal(self.shift + self.scaled.ln())
        }
    }

    /// Moment sums divided by the total; `None` when the total is zero.
    pub fn normalized_moments(&self) -> Option<Vec<f64>> {
        if self.shift == f64::NEG_INFINITY {
            return None;
        }
        Some(self.moments.iter().map(|m| m / self.scaled).collect())
    }
}
