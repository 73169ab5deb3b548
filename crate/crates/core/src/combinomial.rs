//! Conway-Maxwell binomial ("com-binomial") distribution on `0..=m`.
//!
//! `P(X = j) ∝ p^j (1-p)^(m-j) C(m, j)^ν`. Dividing through by
//! `(1-p)^m (m!)^ν` gives the log-linear form used here:
//!
//! ```text
//! ln P(X = j) = j ln θ - ν ln(j! (m-j)!) - ln Z(θ, ν),   θ = p / (1 - p)
//! Z(θ, ν)     = Σ_k θ^k / (k! (m-k)!)^ν
//! ```
//!
//! `ν = 1` is the binomial; `ν < 1` spreads mass towards `0` and `m`,
//! `ν > 1` piles it onto the mode.

use crate::capture_data::ln_split_factorial;
use crate::error::{Error, Result};
use crate::lognum::LogSumExp;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Success {
    Probability(f64),
    Odds(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComBinomialParams {
    m: usize,
    success: Success,
    nu: f64,
}

impl ComBinomialParams {
    pub fn from_p(m: usize, p: f64, nu: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("p must lie strictly inside (0, 1), got {p}")));
        }
        Self::checked(m, Success::Probability(p), nu)
    }

    pub fn from_theta(m: usize, theta: f64, nu: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::domain(format!("theta must be positive and finite, got {theta}")));
        }
        Self::checked(m, Success::Odds(theta), nu)
    }

    fn checked(m: usize, success: Success, nu: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("com-binomial needs m >= 1"));
        }
        if !nu.is_finite() {
            return Err(Error::domain(format!("nu must be finite, got {nu}")));
        }
        Ok(ComBinomialParams { m, success, nu })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn p(&self) -> f64 {
        match self.success {
            Success::Probability(p) => p,
            Success::Odds(theta) => theta / (1.0 + theta),
        }
    }

    pub fn theta(&self) -> f64 {
        match self.success {
            Success::Probability(p) => p / (1.0 - p),
            Success::Odds(theta) => theta,
        }
    }

    pub fn ln_theta(&self) -> f64 {
        match self.success {
            Success::Probability(p) => p.ln() - (-p).ln_1p(),
            Success::Odds(theta) => theta.ln(),
        }
    }
}

/// `ln Z(θ, ν)` given `ln θ`.
pub(crate) fn log_z_from_ln_theta(ln_theta: f64, nu: f64, m: usize) -> f64 {
    (0..=m)
        .map(|k| k as f64 * ln_theta - nu * ln_split_factorial(k, m))
        .collect::<LogSumExp>()
        .value()
}

/// `ln Z(θ, ν)` for `m` trials.
pub fn log_z(theta: f64, nu: f64, m: usize) -> Result<f64> {
    if theta.is_nan() || theta <= 0.0 {
        return Err(Error::domain(format!("theta must be positive, got {theta}")));
    }
    if m == 0 {
        return Err(Error::domain("com-binomial needs m >= 1"));
    }
    Ok(log_z_from_ln_theta(theta.ln(), nu, m))
}

pub fn log_pmf(j: usize, params: &ComBinomialParams) -> Result<f64> {
    let m = params.m;
    if j > m {
        return Err(Error::domain(format!("j = {j} outside 0..={m}")));
    }
    let ln_theta = params.ln_theta();
    Ok(j as f64 * ln_theta
        - params.nu * ln_split_factorial(j, m)
        - log_z_from_ln_theta(ln_theta, params.nu, m))
}

/// Probabilities for `j = 0..=m`.
pub fn pmf_row(params: &ComBinomialParams) -> Vec<f64> {
    let m = params.m;
    let ln_theta = params.ln_theta();
    let ln_z = log_z_from_ln_theta(ln_theta, params.nu, m);
    (0..=m)
        .map(|j| (j as f64 * ln_theta - params.nu * ln_split_factorial(j, m) - ln_z).exp())
        .collect()
}
