//! Log-domain scalar arithmetic.
//!
//! Every probability, weight and e-value in this crate is carried as a
//! [`LogValue`]: a nonnegative real stored as its natural logarithm. At the
//! horizons used in the Monte Carlo studies (N up to 10^5) factorial ratios and
//! e-values routinely leave the range of `f64`, while their logarithms stay
//! small.

use std::cmp::Ordering;
use std::f64::consts::{LN_10, PI};
use std::fmt;
use std::iter::Product;
use std::ops::{Div, Mul};

use serde::{Deserialize, Serialize};

/// Largest |ln x| for which [`LogValue::to_linear`] returns a finite value.
pub const LINEAR_LIMIT: f64 = 700.0;

/// A nonnegative real number represented by its natural logarithm.
///
/// `ln = -inf` is the exact zero.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogValue(f64);

impl LogValue {
    pub const ZERO: LogValue = LogValue(f64::NEG_INFINITY);
    pub const ONE: LogValue = LogValue(0.0);

    /// Wraps a natural logarithm. `NaN` and `+inf` are rejected.
    pub fn from_ln(ln: f64) -> Self {
        assert!(
            !ln.is_nan() && ln != f64::INFINITY,
            "invalid log value {ln}"
        );
        LogValue(ln)
    }

    pub fn from_log10(log10: f64) -> Self {
        Self::from_ln(log10 * LN_10)
    }

    /// Converts a nonnegative linear value.
    pub fn from_linear(x: f64) -> Self {
        assert!(x >= 0.0 && x.is_finite(), "invalid linear value {x}");
        LogValue(x.ln())
    }

    /// `numerator / denominator` for machine integers, with `denominator > 0`.
    pub fn from_ratio(numerator: u64, denominator: u64) -> Self {
        assert!(denominator > 0, "zero denominator");
        if numerator == 0 {
            return Self::ZERO;
        }
        LogValue((numerator as f64).ln() - (denominator as f64).ln())
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn log10(self) -> f64 {
        self.0 / LN_10
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// Linear value, or `None` when `|ln| > LINEAR_LIMIT` (zero is always
    /// representable).
    pub fn to_linear(self) -> Option<f64> {
        if self.is_zero() {
            Some(0.0)
        } else if self.0.abs() <= LINEAR_LIMIT {
            Some(self.0.exp())
        } else {
            None
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        LogValue(-self.0)
    }

    pub fn powi(self, exponent: u64) -> Self {
        if exponent == 0 {
            return Self::ONE;
        }
        if self.is_zero() {
            return Self::ZERO;
        }
        LogValue(self.0 * exponent as f64)
    }

    /// Sum of two represented values.
    pub fn plus(self, other: Self) -> Self {
        log_sum(&[self, other])
    }
}

impl fmt::Debug for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogValue(ln={})", self.0)
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_linear() {
            Some(x) if self.log10().abs() <= 300.0 => write!(f, "{x}"),
            _ => write!(f, "10^{}", self.log10()),
        }
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl Mul for LogValue {
    type Output = LogValue;

    #[inline]
    fn mul(self, rhs: LogValue) -> LogValue {
        if self.is_zero() || rhs.is_zero() {
            return LogValue::ZERO;
        }
        LogValue(self.0 + rhs.0)
    }
}

impl Div for LogValue {
    type Output = LogValue;

    #[inline]
    fn div(self, rhs: LogValue) -> LogValue {
        assert!(!rhs.is_zero(), "division by zero");
        if self.is_zero() {
            return LogValue::ZERO;
        }
        LogValue(self.0 - rhs.0)
    }
}

impl Product for LogValue {
    fn product<I: Iterator<Item = LogValue>>(iter: I) -> Self {
        iter.fold(LogValue::ONE, |acc, x| acc * x)
    }
}

// Stirling-series coefficients B_{2k} / (2k (2k-1)) for ln Γ.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

const STIRLING_SHIFT: f64 = 16.0;

/// Natural logarithm of the gamma function for `x > 0`.
///
/// Arguments below 16 are shifted up with the recurrence
/// `Γ(x) = Γ(x + k) / (x (x+1) ... (x+k-1))`, then the asymptotic Stirling
/// series is summed; with eight correction terms its truncation error at
/// `x >= 16` is below `1e-20`.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0 && x.is_finite(), "ln_gamma domain: {x}");
    let mut shift_product = 1.0;
    let mut y = x;
    while y < STIRLING_SHIFT {
        shift_product *= y;
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut power = inv;
    for c in STIRLING {
        series += c * power;
        power *= inv2;
    }
    let half_ln_two_pi = 0.5 * (2.0 * PI).ln();
    (y - 0.5) * y.ln() - y + half_ln_two_pi + series - shift_product.ln()
}

/// `ln(n!)`, computed as `ln Γ(n + 1)`.
pub fn log_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0)
}

/// `C(n, k)` in log form; zero outside `0 <= k <= n`.
pub fn log_binomial(n: u64, k: i64) -> LogValue {
    if k < 0 || k as u64 > n {
        return LogValue::ZERO;
    }
    let k = k as u64;
    if k == 0 || k == n {
        return LogValue::ONE;
    }
    LogValue(log_factorial(n) - log_factorial(k) - log_factorial(n - k))
}

/// `B(a + 1, b + 1) = a! b! / (a + b + 1)!` in log form.
pub fn log_beta_counts(a: u64, b: u64) -> LogValue {
    LogValue(log_factorial(a) + log_factorial(b) - log_factorial(a + b + 1))
}

/// Log of the sum of the represented values, using the max-shift technique.
pub fn log_sum(values: &[LogValue]) -> LogValue {
    let max = values.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return LogValue::ZERO;
    }
    let total: f64 = values.iter().map(|v| (v.0 - max).exp()).sum();
    LogValue(max + total.ln())
}
