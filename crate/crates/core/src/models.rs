//! Integrated likelihoods for the unknown count `n`, one per model, and the
//! demographic plausibility range.
//!
//! Each log-likelihood is defined only up to an additive constant that does
//! not depend on `n`. Compare them through normalized posteriors or through
//! differences between `n` values, never as raw numbers.

use crate::capture_data::{CaptureTable, ReducedTable, SummaryStats};
use crate::combinomial::log_z_from_ln_theta;
use crate::error::{Error, Result};
use crate::lognum::{log_factorial, LogSumExp, LogWeight};
use crate::posterior::{compute_posterior, PosteriorDistribution, PriorSpec};

/// Prior upper bound on the total used for the simple model by default.
pub const SIMPLE_DEFAULT_TOTAL_MAX: u64 = 25_000;
/// Prior upper bound on the total used for the letter-survival models by default.
pub const SURVIVAL_DEFAULT_TOTAL_MAX: u64 = 5_850;

/// Simple dual-systems model on the 2x2 reduction, with independent uniform
/// priors on both capture probabilities:
///
/// `ln[(n_0+)! (n_+0)! / (n! (n_++ + 1) (n_++ + 1)!)]`
pub fn loglik_simple(n: u64, table: &ReducedTable) -> LogWeight {
    let row0 = n + table.n01;
    let col0 = n + table.n10;
    let total = n + table.observed_total();
    LogWeight(
        log_factorial(row0) + log_factorial(col0)
            - log_factorial(n)
            - ((total + 1) as f64).ln()
            - log_factorial(total + 1),
    )
}

/// Binomial letter-survival model: every one of the `m` letters survives
/// independently with probability `p`, uniform priors on `p` and on the
/// other-source mention probability:
///
/// `ln[(m n_++ - S1)! (n_0+)! / (n! (m n_++ + 1)! (n_++ + 1))]`
pub fn loglik_binomial(n: u64, stats: &SummaryStats, m: usize) -> Result<LogWeight> {
    let total = n + stats.observed_total;
    let letters = m as u64 * total;
    if stats.s1 > letters {
        return Err(Error::domain(format!(
            "{} surviving letters exceed the {letters} issued to {total} events",
            stats.s1
        )));
    }
    Ok(LogWeight(
        log_factorial(letters - stats.s1) + log_factorial(n + stats.n0_plus_known)
            - log_factorial(n)
            - log_factorial(letters + 1)
            - ((total + 1) as f64).ln(),
    ))
}

/// Quadrature grid for the com-binomial nuisance parameters.
///
/// `p` uses the midpoint rule on `(0, 1)`; `ν` is uniform on `[nu_min, 1]`
/// with both endpoints included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NuisanceGrid {
    pub p_points: usize,
    pub nu_min: f64,
    pub nu_points: usize,
}

impl Default for NuisanceGrid {
    fn default() -> Self {
        NuisanceGrid {
            p_points: 400,
            nu_min: -5.0,
            nu_points: 241,
        }
    }
}

impl NuisanceGrid {
    /// A grid that puts all prior mass on `ν = 1`, i.e. the binomial model.
    pub fn binomial_only(p_points: usize) -> Self {
        NuisanceGrid {
            p_points,
            nu_min: 1.0,
            nu_points: 1,
        }
    }

    pub fn refined(&self) -> Self {
        NuisanceGrid {
            p_points: 2 * self.p_points,
            nu_min: self.nu_min,
            nu_points: 2 * self.nu_points - 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_points <= 1 {
            return Err(Error::usage(format!("p grid needs at least 2 points, got {}", self.p_points)));
        }
        if !self.nu_min.is_finite() || self.nu_min > 1.0 {
            return Err(Error::usage(format!("nu_min must be finite and at most 1, got {}", self.nu_min)));
        }
        let point_mass = self.nu_points == 1 && self.nu_min == 1.0;
        if self.nu_points == 0 || (self.nu_points == 1 && !point_mass) {
            return Err(Error::usage(format!(
                "nu grid needs at least 2 points on [{}, 1], got {}",
                self.nu_min, self.nu_points
            )));
        }
        if self.nu_points > 1 && self.nu_min == 1.0 {
            return Err(Error::usage("nu grid with several points needs nu_min < 1"));
        }
        Ok(())
    }

    pub fn p_values(&self) -> Vec<f64> {
        let h = 1.0 / self.p_points as f64;
        (0..self.p_points).map(|i| (i as f64 + 0.5) * h).collect()
    }

    pub fn nu_values(&self) -> Vec<f64> {
        if self.nu_points == 1 {
            return vec![1.0];
        }
        let span = 1.0 - self.nu_min;
        let last = self.nu_points - 1;
        (0..self.nu_points)
            .map(|k| {
                if k == last {
                    1.0
                } else {
                    self.nu_min + span * k as f64 / last as f64
                }
            })
            .collect()
    }
}

/// Com-binomial letter-survival likelihood, integrated numerically over
/// `(p, ν)` with `ν <= 1`.
///
/// The per-event survival law is com-binomial with odds `θ = p/(1-p)`. With a
/// uniform prior on `p`, integrating over `p` is the same as integrating over
/// `θ` with density `(1+θ)^-2`, so the midpoint grid in `p` carries that
/// Jacobian without any extra factor. `ln Z` is tabulated once per grid node;
/// each evaluation is then a single pass over the nodes.
#[derive(Clone, Debug)]
pub struct ComBinomialLikelihood {
    stats: SummaryStats,
    ln_m_factorial: f64,
    nus: Vec<f64>,
    /// `s1 ln θ_i - s2_known ν_k`, row-major over `(p_i, ν_k)`.
    data_term: Vec<f64>,
    /// `ln Z(θ_i, ν_k)`, same layout.
    log_z: Vec<f64>,
    /// `-ln(#p) - ln(#ν)`: normalized uniform weights.
    ln_node_weight: f64,
}

impl ComBinomialLikelihood {
    pub fn new(stats: &SummaryStats, m: usize, grid: &NuisanceGrid) -> Result<Self> {
        grid.validate()?;
        if m == 0 {
            return Err(Error::domain("m must be positive"));
        }
        let nus = grid.nu_values();
        let ln_thetas: Vec<f64> = grid
            .p_values()
            .into_iter()
            .map(|p| p.ln() - (-p).ln_1p())
            .collect();

        let nodes = ln_thetas.len() * nus.len();
        let mut data_term = Vec::with_capacity(nodes);
        let mut log_z = Vec::with_capacity(nodes);
        for &ln_theta in &ln_thetas {
            for &nu in &nus {
                data_term.push(stats.s1 as f64 * ln_theta - stats.s2_known * nu);
                log_z.push(log_z_from_ln_theta(ln_theta, nu, m));
            }
        }

        Ok(ComBinomialLikelihood {
            stats: *stats,
            ln_m_factorial: log_factorial(m as u64),
            ln_node_weight: -(ln_thetas.len() as f64).ln() - (nus.len() as f64).ln(),
            nus,
            data_term,
            log_z,
        })
    }

    pub fn evaluate(&self, n: u64) -> LogWeight {
        let total = n + self.stats.observed_total;
        let total_f = total as f64;
        // each unseen event sits in column j = 0 and contributes ln(0! m!) to s2
        let unseen_s2 = n as f64 * self.ln_m_factorial;

        let mut acc = LogSumExp::new();
        let per_p = self.nus.len();
        for (row_data, row_z) in self
            .data_term
            .chunks_exact(per_p)
            .zip(self.log_z.chunks_exact(per_p))
        {
            for ((d, z), nu) in row_data.iter().zip(row_z).zip(&self.nus) {
                acc.add(d - unseen_s2 * nu - total_f * z);
            }
        }

        LogWeight(
            log_factorial(n + self.stats.n0_plus_known) - log_factorial(n) - (total_f + 1.0).ln()
                + acc.value()
                + self.ln_node_weight,
        )
    }
}

/// One-shot form of [`ComBinomialLikelihood::evaluate`]. Builds the grid
/// tables on every call; use the struct directly for a whole posterior.
pub fn loglik_combinomial(
    n: u64,
    stats: &SummaryStats,
    m: usize,
    grid: &NuisanceGrid,
) -> Result<LogWeight> {
    Ok(ComBinomialLikelihood::new(stats, m, grid)?.evaluate(n))
}

/// Which integrated likelihood to use.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    Simple,
    Binomial,
    ComBinomial(NuisanceGrid),
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Simple => "simple",
            Model::Binomial => "binomial",
            Model::ComBinomial(_) => "combinomial",
        }
    }

    pub fn default_prior(&self, observed_total: u64) -> PriorSpec {
        let max = match self {
            Model::Simple => SIMPLE_DEFAULT_TOTAL_MAX,
            _ => SURVIVAL_DEFAULT_TOTAL_MAX,
        };
        PriorSpec::new(observed_total, max.max(observed_total))
    }

    pub fn posterior(&self, table: &CaptureTable, prior: &PriorSpec) -> Result<PosteriorDistribution> {
        let observed = table.observed_total();
        match self {
            Model::Simple => {
                let reduced = table.reduce();
                compute_posterior(|n| Ok(loglik_simple(n, &reduced)), prior, observed)
            }
            Model::Binomial => {
                let stats = table.summarize();
                let m = table.m();
                compute_posterior(|n| loglik_binomial(n, &stats, m), prior, observed)
            }
            Model::ComBinomial(grid) => {
                let lik = ComBinomialLikelihood::new(&table.summarize(), table.m(), grid)?;
                compute_posterior(|n| Ok(lik.evaluate(n)), prior, observed)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub population: f64,
    pub years: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DemographicInputs {
    pub segments: Vec<Segment>,
    /// Killings per 100,000 persons per year.
    pub rate_low: f64,
    pub rate_high: f64,
}

impl DemographicInputs {
    /// Rural southern Norway: 330,000 people for 1300-1350, 130,000 for
    /// 1350-1569, at 8 to 13 killings per 100,000 per year.
    pub fn rural_norway() -> Self {
        DemographicInputs {
            segments: vec![
                Segment { population: 330_000.0, years: 50.0 },
                Segment { population: 130_000.0, years: 219.0 },
            ],
            rate_low: 8.0,
            rate_high: 13.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let values = self
            .segments
            .iter()
            .flat_map(|s| [s.population, s.years])
            .chain([self.rate_low, self.rate_high]);
        for v in values {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::usage(format!("demographic inputs must be non-negative, got {v}")));
            }
        }
        if self.rate_low > self.rate_high {
            return Err(Error::usage("rate_low exceeds rate_high"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DemographicRange {
    pub low: f64,
    pub high: f64,
    pub low_rounded: f64,
    pub high_rounded: f64,
    /// Person-years contributed by each segment, in input order.
    pub person_years: Vec<f64>,
}

fn round_to_50(x: f64) -> f64 {
    (x / 50.0).round() * 50.0
}

/// Expected number of killings over the segments at the low and high rates.
pub fn demographic_range(inputs: &DemographicInputs) -> Result<DemographicRange> {
    inputs.validate()?;
    let person_years: Vec<f64> = inputs.segments.iter().map(|s| s.population * s.years).collect();
    let exposure: f64 = person_years.iter().sum::<f64>() / 100_000.0;
    let low = exposure * inputs.rate_low;
    let high = exposure * inputs.rate_high;
    Ok(DemographicRange {
        low,
        high,
        low_rounded: round_to_50(low),
        high_rounded: round_to_50(high),
        person_years,
    })
}
