//! Closed-form likelihoods against brute-force quadrature, run from the
//! command line.

use dualsys_core::models::ComBinomialLikelihood;
use dualsys_core::oracle::{
    integrate_binomial_bruteforce, integrate_combinomial_bruteforce, integrate_simple_bruteforce,
    QuadratureSpec, Rule,
};
use dualsys_core::{loglik_binomial, loglik_simple, CaptureTable, NuisanceGrid, ReducedTable};

use crate::error::CliError;

pub struct Check {
    pub name: String,
    pub error: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.error < self.tolerance
    }
}

/// Relative error between two likelihood ratios given as log differences.
fn ratio_error(a: f64, b: f64) -> f64 {
    (a - b).exp_m1().abs()
}

pub fn run_checks(points: usize) -> Result<Vec<Check>, CliError> {
    let quad = QuadratureSpec::new(points, Rule::Midpoint)?;
    let reduced = ReducedTable { n01: 2, n10: 2, n11: 1 };
    let table = CaptureTable::new(5, vec![1, 1, 0, 0, 0], vec![2, 1, 0, 0, 0, 0])?;
    let stats = table.summarize();
    let mut checks = Vec::new();

    let simple0 = integrate_simple_bruteforce(0, &reduced, &quad)?;
    let binom0 = integrate_binomial_bruteforce(0, &table, &quad)?;
    for n in [5u64, 50] {
        let brute = integrate_simple_bruteforce(n, &reduced, &quad)? - simple0;
        let closed = loglik_simple(n, &reduced).value() - loglik_simple(0, &reduced).value();
        checks.push(Check {
            name: format!("simple model, n = {n}"),
            error: ratio_error(brute, closed),
            tolerance: 1e-6,
        });

        let brute = integrate_binomial_bruteforce(n, &table, &quad)? - binom0;
        let closed =
            loglik_binomial(n, &stats, 5)?.value() - loglik_binomial(0, &stats, 5)?.value();
        checks.push(Check {
            name: format!("binomial model, n = {n}"),
            error: ratio_error(brute, closed),
            tolerance: 1e-6,
        });
    }

    let bundled = CaptureTable::bundled();
    let grid = NuisanceGrid::default();
    let grid_quad = QuadratureSpec::new(grid.p_points, Rule::Midpoint)?;
    let lik = ComBinomialLikelihood::new(&bundled.summarize(), bundled.m(), &grid)?;
    for n in [0u64, 10, 100] {
        let brute = |k| integrate_combinomial_bruteforce(k, &bundled, &grid_quad, grid.nu_min, grid.nu_points);
        let brute_step = brute(n + 1)? - brute(n)?;
        let closed_step = lik.evaluate(n + 1).value() - lik.evaluate(n).value();
        checks.push(Check {
            name: format!("com-binomial log-ratio, n = {n}"),
            error: (brute_step - closed_step).abs(),
            tolerance: 1e-4,
        });
    }
    Ok(checks)
}
