//! Discrete posterior over the total count under a uniform prior.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lognum::{log_sum_exp, LogWeight};

/// Slack when comparing a cumulative sum against a requested level, so that
/// e.g. five masses of 0.1 still reach 0.5.
const CDF_TIE_TOLERANCE: f64 = 1e-12;

pub const DECILE_LEVELS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Uniform prior on `total = n + observed` over `[total_min, total_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PriorSpec {
    pub total_min: u64,
    pub total_max: u64,
}

impl PriorSpec {
    pub fn new(total_min: u64, total_max: u64) -> Self {
        PriorSpec { total_min, total_max }
    }

    pub fn validate(&self, observed_total: u64) -> Result<()> {
        if self.total_min < observed_total {
            return Err(Error::usage(format!(
                "prior lower bound {} is below the observed total {observed_total}",
                self.total_min
            )));
        }
        if self.total_max < self.total_min {
            return Err(Error::usage(format!(
                "prior upper bound {} is below the lower bound {}",
                self.total_max, self.total_min
            )));
        }
        Ok(())
    }

    pub fn support_len(&self) -> usize {
        (self.total_max - self.total_min + 1) as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorDistribution {
    first_total: u64,
    log_weights: Vec<f64>,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl PosteriorDistribution {
    /// Normalizes unnormalized log-weights attached to the contiguous totals
    /// `first_total, first_total + 1, ...`.
    pub fn from_log_weights(first_total: u64, log_weights: Vec<f64>) -> Result<Self> {
        if let Some(i) = log_weights.iter().position(|w| w.is_nan() || *w == f64::INFINITY) {
            return Err(Error::numeric(format!(
                "log-weight at total {} is {}",
                first_total + i as u64,
                log_weights[i]
            )));
        }
        let norm = log_sum_exp(&log_weights)?;
        if norm == f64::NEG_INFINITY {
            return Err(Error::numeric("every log-weight is -inf, posterior has no mass"));
        }
        let probs: Vec<f64> = log_weights.iter().map(|w| (w - norm).exp()).collect();
        let cdf = probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        Ok(PosteriorDistribution {
            first_total,
            log_weights,
            probs,
            cdf,
        })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn first_total(&self) -> u64 {
        self.first_total
    }

    pub fn last_total(&self) -> u64 {
        self.first_total + self.probs.len() as u64 - 1
    }

    pub fn totals(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.probs.len() as u64).map(move |i| self.first_total + i)
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `P(total <= t)`.
    pub fn cdf(&self, total: u64) -> f64 {
        if total < self.first_total {
            0.0
        } else if total >= self.last_total() {
            1.0
        } else {
            self.cdf[(total - self.first_total) as usize]
        }
    }

    /// Smallest total whose cumulative probability reaches `q`.
    pub fn quantile(&self, q: f64) -> Result<u64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain(format!("quantile level must be in (0, 1), got {q}")));
        }
        let idx = self.cdf.partition_point(|c| *c < q - CDF_TIE_TOLERANCE);
        Ok(self.first_total + idx.min(self.probs.len() - 1) as u64)
    }

    pub fn mean(&self) -> f64 {
        self.totals()
            .zip(&self.probs)
            .map(|(t, p)| t as f64 * p)
            .sum()
    }

    pub fn decile_report(&self) -> QuantileReport {
        let deciles = DECILE_LEVELS
            .iter()
            .map(|&q| (q, self.quantile(q).expect("decile levels are interior")))
            .collect::<Vec<_>>();
        QuantileReport {
            median: deciles[4].1,
            deciles,
            mean: self.mean(),
        }
    }
}

/// Deciles of a posterior, plus its mean.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantileReport {
    /// `(level, total)` for levels 0.1 through 0.9.
    pub deciles: Vec<(f64, u64)>,
    pub median: u64,
    pub mean: f64,
}

impl QuantileReport {
    pub fn totals(&self) -> Vec<u64> {
        self.deciles.iter().map(|(_, t)| *t).collect()
    }
}

/// Evaluates `loglik(n)` for every `n = total - observed_total` in the prior
/// support and normalizes.
///
/// Evaluations run on the ambient rayon pool; the result does not depend on
/// how many workers it has.
pub fn compute_posterior<F>(
    loglik: F,
    prior: &PriorSpec,
    observed_total: u64,
) -> Result<PosteriorDistribution>
where
    F: Fn(u64) -> Result<LogWeight> + Sync,
{
    prior.validate(observed_total)?;
    let n_min = prior.total_min - observed_total;
    let n_max = prior.total_max - observed_total;

    let evaluated: Vec<Result<LogWeight>> = (n_min..=n_max).into_par_iter().map(&loglik).collect();

    let mut log_weights = Vec::with_capacity(evaluated.len());
    for (n, w) in (n_min..).zip(evaluated) {
        match w {
            Ok(w) => log_weights.push(w.value()),
            Err(e) => {
                return Err(Error::Evaluation {
                    n,
                    source: Box::new(e),
                })
            }
        }
    }
    PosteriorDistribution::from_log_weights(prior.total_min, log_weights)
}
