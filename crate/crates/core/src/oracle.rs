//! Brute-force checks of the closed-form integrated likelihoods.
//!
//! These integrate the unreduced likelihoods numerically: full multinomial
//! coefficients, the original `p` parameterization of the com-binomial, no
//! dropped constants. They share only the log-factorial primitives with the
//! production path. Compare them with the closed forms through differences
//! across `n`; the production evaluators drop `n`-free constants.

use crate::capture_data::CaptureTable;
use crate::error::{Error, Result};
use crate::lognum::{log_binomial, log_factorial, LogSumExp};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Midpoint,
    Trapezoid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub points_per_axis: usize,
    pub rule: Rule,
}

impl QuadratureSpec {
    pub const MIN_POINTS: usize = 8;

    pub fn new(points_per_axis: usize, rule: Rule) -> Result<Self> {
        let spec = QuadratureSpec { points_per_axis, rule };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points_per_axis < Self::MIN_POINTS {
            return Err(Error::usage(format!(
                "quadrature needs at least {} points per axis, got {}",
                Self::MIN_POINTS,
                self.points_per_axis
            )));
        }
        Ok(())
    }

    /// `(x, ln w)` nodes on `[0, 1]`.
    pub fn unit_nodes(&self) -> Vec<(f64, f64)> {
        let n = self.points_per_axis;
        match self.rule {
            Rule::Midpoint => {
                let h = 1.0 / n as f64;
                (0..n).map(|i| ((i as f64 + 0.5) * h, h.ln())).collect()
            }
            Rule::Trapezoid => {
                let h = 1.0 / (n - 1) as f64;
                (0..n)
                    .map(|i| {
                        let w = if i == 0 || i == n - 1 { 0.5 * h } else { h };
                        (i as f64 * h, w.ln())
                    })
                    .collect()
            }
        }
    }
}

/// `a ln x` with `0 ln 0 = 0`.
fn xlogx(a: f64, x: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * x.ln()
    }
}

/// `ln[x^a (1-x)^b]` on a node.
fn ln_beta_kernel(x: f64, a: f64, b: f64) -> f64 {
    xlogx(a, x) + xlogx(b, 1.0 - x)
}

fn ln_multinomial(total: u64, cells: &[u64]) -> f64 {
    log_factorial(total) - cells.iter().map(|&c| log_factorial(c)).sum::<f64>()
}

/// Natural log of the simple-model likelihood
/// `C(n_++; n, n01, n10, n11) p^n1+ (1-p)^n0+ q^n+1 (1-q)^n+0`
/// integrated over the unit square by a tensor-product rule.
pub fn integrate_simple_bruteforce(
    n: u64,
    table: &crate::capture_data::ReducedTable,
    quad: &QuadratureSpec,
) -> Result<f64> {
    quad.validate()?;
    let row1 = (table.n10 + table.n11) as f64;
    let row0 = (n + table.n01) as f64;
    let col1 = (table.n01 + table.n11) as f64;
    let col0 = (n + table.n10) as f64;
    let total = n + table.n01 + table.n10 + table.n11;

    let nodes = quad.unit_nodes();
    let mut acc = LogSumExp::new();
    for &(p, wp) in &nodes {
        let fp = wp + ln_beta_kernel(p, row1, row0);
        for &(q, wq) in &nodes {
            acc.add(fp + wq + ln_beta_kernel(q, col1, col0));
        }
    }
    Ok(ln_multinomial(total, &[n, table.n01, table.n10, table.n11]) + acc.value())
}

/// Column totals with the unknown `n` placed in column 0, and every cell.
struct FullCells {
    columns: Vec<u64>,
    cells: Vec<u64>,
    row0: u64,
    row1: u64,
    total: u64,
}

fn full_cells(n: u64, table: &CaptureTable) -> FullCells {
    let m = table.m();
    let mut cells = vec![n];
    cells.extend((1..=m).map(|j| table.no_mention(j).unwrap_or(0)));
    cells.extend((0..=m).map(|j| table.mention(j)));
    let columns: Vec<u64> = (0..=m)
        .map(|j| table.mention(j) + if j == 0 { n } else { table.no_mention(j).unwrap_or(0) })
        .collect();
    let row0 = cells[..=m].iter().sum();
    let row1 = cells[m + 1..].iter().sum();
    FullCells {
        total: row0 + row1,
        columns,
        cells,
        row0,
        row1,
    }
}

/// `Σ_j n_+j ln r_j` with `r_j` the binomial(m, p) probability of `j`
/// survivors, evaluated cell by cell.
fn ln_binomial_survival(p: f64, columns: &[u64], m: usize) -> f64 {
    columns
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let c = c as f64;
            if c == 0.0 {
                return 0.0;
            }
            let ln_r = log_binomial(m as u64, j as u64).expect("j <= m")
                + xlogx(j as f64, p)
                + xlogx((m - j) as f64, 1.0 - p);
            c * ln_r
        })
        .sum()
}

/// Natural log of the binomial letter-survival likelihood
/// `n_++!/Π n_ij! · Π_j r_j^n+j · s^n1+ (1-s)^n0+`, `r_j = C(m,j) p^j (1-p)^(m-j)`,
/// integrated over `(p, s)` by a tensor-product rule.
pub fn integrate_binomial_bruteforce(n: u64, table: &CaptureTable, quad: &QuadratureSpec) -> Result<f64> {
    quad.validate()?;
    let m = table.m();
    let cells = full_cells(n, table);
    let nodes = quad.unit_nodes();

    let survival: Vec<f64> = nodes
        .iter()
        .map(|&(p, w)| w + ln_binomial_survival(p, &cells.columns, m))
        .collect();
    let mention: Vec<f64> = nodes
        .iter()
        .map(|&(s, w)| w + ln_beta_kernel(s, cells.row1 as f64, cells.row0 as f64))
        .collect();

    let mut acc = LogSumExp::new();
    for fp in &survival {
        for fs in &mention {
            acc.add(fp + fs);
        }
    }
    Ok(ln_multinomial(cells.total, &cells.cells) + acc.value())
}

/// `ln P(X = j | p, ν)` straight from the defining ratio
/// `p^j (1-p)^(m-j) C(m,j)^ν / Σ_k p^k (1-p)^(m-k) C(m,k)^ν`.
fn ln_com_binomial_direct(p: f64, nu: f64, m: usize) -> Vec<f64> {
    let unnormalized: Vec<f64> = (0..=m)
        .map(|j| {
            xlogx(j as f64, p)
                + xlogx((m - j) as f64, 1.0 - p)
                + nu * log_binomial(m as u64, j as u64).expect("j <= m")
        })
        .collect();
    let norm: LogSumExp = unnormalized.iter().copied().collect();
    let norm = norm.value();
    unnormalized.into_iter().map(|u| u - norm).collect()
}

/// Natural log of the com-binomial letter-survival likelihood with `s`
/// integrated in closed form (beta integral) and `(p, ν)` integrated
/// numerically.
///
/// `p` follows `quad`. `ν` takes `nu_points` equally weighted nodes on
/// `[nu_min, 1]`, endpoints included, the same nodes the production grid
/// uses; `nu_points = 1` with `nu_min = 1` pins `ν = 1`.
pub fn integrate_combinomial_bruteforce(
    n: u64,
    table: &CaptureTable,
    quad: &QuadratureSpec,
    nu_min: f64,
    nu_points: usize,
) -> Result<f64> {
    quad.validate()?;
    let nus: Vec<f64> = match nu_points {
        0 => return Err(Error::usage("nu axis needs at least one point")),
        1 if nu_min == 1.0 => vec![1.0],
        1 => return Err(Error::usage("a single nu node must sit at 1")),
        k => (0..k)
            .map(|i| if i == k - 1 { 1.0 } else { nu_min + (1.0 - nu_min) * i as f64 / (k - 1) as f64 })
            .collect(),
    };
    let m = table.m();
    let cells = full_cells(n, table);
    let ln_nu_weight = -(nus.len() as f64).ln();

    let mut acc = LogSumExp::new();
    for &(p, wp) in &quad.unit_nodes() {
        for &nu in &nus {
            let ln_r = ln_com_binomial_direct(p, nu, m);
            let ln_survival: f64 = cells
                .columns
                .iter()
                .zip(&ln_r)
                .map(|(&c, lr)| if c == 0 { 0.0 } else { c as f64 * lr })
                .sum();
            acc.add(wp + ln_nu_weight + ln_survival);
        }
    }

    let mention_integral = log_factorial(cells.row1) + log_factorial(cells.row0)
        - log_factorial(cells.total + 1);
    Ok(ln_multinomial(cells.total, &cells.cells) + mention_integral + acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capture_data::ReducedTable;

    #[test]
    fn rejects_coarse_quadrature() {
        assert!(QuadratureSpec::new(7, Rule::Midpoint).is_err());
        assert!(QuadratureSpec::new(8, Rule::Trapezoid).is_ok());
    }

    #[test]
    fn weights_sum_to_one() {
        for rule in [Rule::Midpoint, Rule::Trapezoid] {
            let q = QuadratureSpec::new(33, rule).unwrap();
            let total: f64 = q.unit_nodes().iter().map(|(_, lw)| lw.exp()).sum();
            assert!((total - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn empty_table_integrates_to_one() {
        let empty = ReducedTable { n01: 0, n10: 0, n11: 0 };
        for rule in [Rule::Midpoint, Rule::Trapezoid] {
            let q = QuadratureSpec::new(64, rule).unwrap();
            let v = integrate_simple_bruteforce(0, &empty, &q).unwrap();
            assert!(v.abs() < 1e-14, "{rule:?}: {v}");
        }
    }

    #[test]
    fn beta_integral_spot_check() {
        // ∫ x^3 (1-x)^2 dx = 3! 2! / 6! = 1/60
        let q = QuadratureSpec::new(512, Rule::Midpoint).unwrap();
        let ln_integral: f64 = q
            .unit_nodes()
            .iter()
            .map(|&(x, w)| w + ln_beta_kernel(x, 3.0, 2.0))
            .collect::<LogSumExp>()
            .value();
        let closed = log_factorial(3) + log_factorial(2) - log_factorial(6);
        assert!((closed - (1.0f64 / 60.0).ln()).abs() < 1e-14);
        assert!((ln_integral.exp() * 60.0 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn direct_com_binomial_normalizes() {
        for nu in [-3.0, 0.0, 1.0, 2.5] {
            let total: f64 = ln_com_binomial_direct(0.3, nu, 5).iter().map(|l| l.exp()).sum();
            assert!((total - 1.0).abs() < 1e-13);
        }
    }
}
