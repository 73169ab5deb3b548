//! Python bindings: `import dualsys`.
//!
//! Core errors surface as `ValueError` (bad arguments or data), `OSError`
//! (unreadable files), `ArithmeticError` (numeric failure) or `RuntimeError`
//! (a likelihood evaluation failed).

use std::path::PathBuf;

use dualsys_core as core;
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(err: core::Error) -> PyErr {
    let msg = err.to_string();
    match err {
        core::Error::Domain(_) | core::Error::Usage(_) | core::Error::Ingestion { .. } => PyValueError::new_err(msg),
        core::Error::Io { .. } => PyOSError::new_err(msg),
        core::Error::Numeric(_) => PyArithmeticError::new_err(msg),
        core::Error::Evaluation { .. } => PyRuntimeError::new_err(msg),
    }
}

/// A 2 x (m+1) capture table with the (no mention, no letters) cell unknown.
#[pyclass(name = "CaptureTable", module = "dualsys", frozen)]
struct PyCaptureTable {
    inner: core::CaptureTable,
}

#[pymethods]
impl PyCaptureTable {
    #[new]
    fn new(m: usize, no_mention_known: Vec<u64>, mention: Vec<u64>) -> PyResult<Self> {
        let inner = core::CaptureTable::new(m, no_mention_known, mention).map_err(to_py)?;
        Ok(PyCaptureTable { inner })
    }

    /// The Norwegian letters-of-remission table shipped with the library.
    #[staticmethod]
    fn bundled() -> Self {
        PyCaptureTable {
            inner: core::CaptureTable::bundled(),
        }
    }

    /// Reads a `mentioned_other,letters,count` CSV file.
    #[staticmethod]
    #[pyo3(signature = (path, m = core::capture_data::DEFAULT_MAX_LETTERS))]
    fn load(path: PathBuf, m: usize) -> PyResult<Self> {
        let inner = core::CaptureTable::load(path, m).map_err(to_py)?;
        Ok(PyCaptureTable { inner })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn observed_total(&self) -> u64 {
        self.inner.observed_total()
    }

    /// Count of cases with no other mention and `j` letters; `None` for `j = 0`.
    fn no_mention(&self, j: usize) -> PyResult<Option<u64>> {
        self.check_column(j)?;
        Ok(self.inner.no_mention(j))
    }

    fn mention(&self, j: usize) -> PyResult<u64> {
        self.check_column(j)?;
        Ok(self.inner.mention(j))
    }

    fn reduce(&self) -> PyReducedTable {
        PyReducedTable {
            inner: self.inner.reduce(),
        }
    }

    fn summarize(&self) -> PySummaryStats {
        PySummaryStats {
            inner: self.inner.summarize(),
        }
    }

    fn __repr__(&self) -> String {
        format!("CaptureTable(m={}, observed_total={})", self.inner.m(), self.inner.observed_total())
    }
}

impl PyCaptureTable {
    fn check_column(&self, j: usize) -> PyResult<()> {
        if j > self.inner.m() {
            return Err(PyValueError::new_err(format!("column {j} out of range 0..={}", self.inner.m())));
        }
        Ok(())
    }
}

/// The 2x2 reduction of a capture table.
#[pyclass(name = "ReducedTable", module = "dualsys", frozen)]
struct PyReducedTable {
    inner: core::ReducedTable,
}

#[pymethods]
impl PyReducedTable {
    #[getter]
    fn n01(&self) -> u64 {
        self.inner.n01
    }

    #[getter]
    fn n10(&self) -> u64 {
        self.inner.n10
    }

    #[getter]
    fn n11(&self) -> u64 {
        self.inner.n11
    }

    #[getter]
    fn observed_total(&self) -> u64 {
        self.inner.observed_total()
    }

    fn __repr__(&self) -> String {
        let r = &self.inner;
        format!("ReducedTable(n01={}, n10={}, n11={})", r.n01, r.n10, r.n11)
    }
}

/// Sufficient statistics for the binomial and com-binomial likelihoods.
#[pyclass(name = "SummaryStats", module = "dualsys", frozen)]
struct PySummaryStats {
    inner: core::SummaryStats,
}

#[pymethods]
impl PySummaryStats {
    #[getter]
    fn n0_plus_known(&self) -> u64 {
        self.inner.n0_plus_known
    }

    #[getter]
    fn n1_plus(&self) -> u64 {
        self.inner.n1_plus
    }

    #[getter]
    fn s1(&self) -> u64 {
        self.inner.s1
    }

    #[getter]
    fn s2_known(&self) -> f64 {
        self.inner.s2_known
    }

    #[getter]
    fn observed_total(&self) -> u64 {
        self.inner.observed_total
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!(
            "SummaryStats(n0_plus_known={}, n1_plus={}, s1={}, s2_known={}, observed_total={})",
            s.n0_plus_known, s.n1_plus, s.s1, s.s2_known, s.observed_total
        )
    }
}

/// Normalized posterior over the total number of events.
#[pyclass(name = "Posterior", module = "dualsys", frozen)]
struct PyPosterior {
    inner: core::PosteriorDistribution,
}

#[pymethods]
impl PyPosterior {
    #[getter]
    fn first_total(&self) -> u64 {
        self.inner.first_total()
    }

    #[getter]
    fn last_total(&self) -> u64 {
        self.inner.last_total()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn totals(&self) -> Vec<u64> {
        self.inner.totals().collect()
    }

    fn probs(&self) -> Vec<f64> {
        self.inner.probs().to_vec()
    }

    fn log_weights(&self) -> Vec<f64> {
        self.inner.log_weights().to_vec()
    }

    fn cdf(&self, total: u64) -> f64 {
        self.inner.cdf(total)
    }

    /// Smallest total whose cumulative probability reaches `q`.
    fn quantile(&self, q: f64) -> PyResult<u64> {
        self.inner.quantile(q).map_err(to_py)
    }

    fn mean(&self) -> f64 {
        self.inner.mean()
    }

    fn median(&self) -> u64 {
        self.inner.decile_report().median
    }

    /// `[(0.1, total), ..., (0.9, total)]`.
    fn deciles(&self) -> Vec<(f64, u64)> {
        self.inner.decile_report().deciles
    }

    fn __repr__(&self) -> String {
        format!(
            "Posterior(totals={}..={}, median={})",
            self.inner.first_total(),
            self.inner.last_total(),
            self.inner.decile_report().median
        )
    }
}

#[pyfunction]
fn log_factorial(k: i64) -> PyResult<f64> {
    core::lognum::try_log_factorial(k).map_err(to_py)
}

#[pyfunction]
fn log_binomial(n: u64, k: u64) -> PyResult<f64> {
    core::log_binomial(n, k).map_err(to_py)
}

#[pyfunction]
fn log_sum_exp(weights: Vec<f64>) -> PyResult<f64> {
    core::log_sum_exp(&weights).map_err(to_py)
}

fn params(m: usize, nu: f64, p: Option<f64>, theta: Option<f64>) -> PyResult<core::ComBinomialParams> {
    match (p, theta) {
        (Some(p), None) => core::ComBinomialParams::from_p(m, p, nu).map_err(to_py),
        (None, Some(theta)) => core::ComBinomialParams::from_theta(m, theta, nu).map_err(to_py),
        _ => Err(PyValueError::new_err("pass exactly one of p or theta")),
    }
}

/// Log normalizing constant of the com-binomial distribution.
#[pyfunction]
fn log_z(theta: f64, nu: f64, m: usize) -> PyResult<f64> {
    core::log_z(theta, nu, m).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (j, m, nu, *, p = None, theta = None))]
fn log_pmf(j: usize, m: usize, nu: f64, p: Option<f64>, theta: Option<f64>) -> PyResult<f64> {
    core::log_pmf(j, &params(m, nu, p, theta)?).map_err(to_py)
}

/// Probabilities of `j = 0..=m` surviving letters.
#[pyfunction]
#[pyo3(signature = (m, nu, *, p = None, theta = None))]
fn pmf_row(m: usize, nu: f64, p: Option<f64>, theta: Option<f64>) -> PyResult<Vec<f64>> {
    Ok(core::pmf_row(&params(m, nu, p, theta)?))
}

fn nuisance_grid(p_points: usize, nu_min: f64, nu_points: usize) -> PyResult<core::NuisanceGrid> {
    let grid = core::NuisanceGrid {
        p_points,
        nu_min,
        nu_points,
    };
    grid.validate().map_err(to_py)?;
    Ok(grid)
}

fn default_grid() -> core::NuisanceGrid {
    core::NuisanceGrid::default()
}

#[pyfunction]
fn loglik_simple(n: u64, table: &PyCaptureTable) -> f64 {
    core::loglik_simple(n, &table.inner.reduce()).value()
}

#[pyfunction]
fn loglik_binomial(n: u64, table: &PyCaptureTable) -> PyResult<f64> {
    let stats = table.inner.summarize();
    Ok(core::loglik_binomial(n, &stats, table.inner.m()).map_err(to_py)?.value())
}

#[pyfunction]
#[pyo3(signature = (
    n,
    table,
    p_points = default_grid().p_points,
    nu_min = default_grid().nu_min,
    nu_points = default_grid().nu_points,
))]
fn loglik_combinomial(n: u64, table: &PyCaptureTable, p_points: usize, nu_min: f64, nu_points: usize) -> PyResult<f64> {
    let grid = nuisance_grid(p_points, nu_min, nu_points)?;
    let stats = table.inner.summarize();
    Ok(core::loglik_combinomial(n, &stats, table.inner.m(), &grid).map_err(to_py)?.value())
}

/// Posterior over the total for `model` in {"simple", "binomial", "combinomial"}.
///
/// Prior bounds default to the observed total and the model's standard upper
/// bound. The grid arguments apply to the com-binomial model only.
#[pyfunction]
#[pyo3(signature = (
    table,
    model = "binomial",
    total_min = None,
    total_max = None,
    p_points = default_grid().p_points,
    nu_min = default_grid().nu_min,
    nu_points = default_grid().nu_points,
))]
#[allow(clippy::too_many_arguments)]
fn posterior(
    py: Python<'_>,
    table: &PyCaptureTable,
    model: &str,
    total_min: Option<u64>,
    total_max: Option<u64>,
    p_points: usize,
    nu_min: f64,
    nu_points: usize,
) -> PyResult<PyPosterior> {
    let model = match model {
        "simple" => core::Model::Simple,
        "binomial" => core::Model::Binomial,
        "combinomial" => core::Model::ComBinomial(nuisance_grid(p_points, nu_min, nu_points)?),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown model {other:?}; expected simple, binomial or combinomial"
            )))
        }
    };
    let observed = table.inner.observed_total();
    let default = model.default_prior(observed);
    let prior = core::PriorSpec::new(
        total_min.unwrap_or(default.total_min),
        total_max.unwrap_or(default.total_max),
    );
    let inner = py.detach(|| model.posterior(&table.inner, &prior)).map_err(to_py)?;
    Ok(PyPosterior { inner })
}

/// Expected killings over population segments given as `(population, years)`.
///
/// Returns a dict with `low`, `high`, `low_rounded`, `high_rounded` and
/// `person_years`. Defaults describe rural southern Norway, 1300-1569.
#[pyfunction]
#[pyo3(signature = (segments = None, rate_low = None, rate_high = None))]
fn demographic_range(
    py: Python<'_>,
    segments: Option<Vec<(f64, f64)>>,
    rate_low: Option<f64>,
    rate_high: Option<f64>,
) -> PyResult<Py<pyo3::types::PyDict>> {
    let mut inputs = core::DemographicInputs::rural_norway();
    if let Some(segments) = segments {
        inputs.segments = segments
            .into_iter()
            .map(|(population, years)| core::Segment { population, years })
            .collect();
    }
    inputs.rate_low = rate_low.unwrap_or(inputs.rate_low);
    inputs.rate_high = rate_high.unwrap_or(inputs.rate_high);
    let range = core::demographic_range(&inputs).map_err(to_py)?;
    let dict = pyo3::types::PyDict::new(py);
    dict.set_item("low", range.low)?;
    dict.set_item("high", range.high)?;
    dict.set_item("low_rounded", range.low_rounded)?;
    dict.set_item("high_rounded", range.high_rounded)?;
    dict.set_item("person_years", range.person_years)?;
    Ok(dict.unbind())
}

#[pymodule]
fn dualsys(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCaptureTable>()?;
    m.add_class::<PyReducedTable>()?;
    m.add_class::<PySummaryStats>()?;
    m.add_class::<PyPosterior>()?;
    m.add_function(wrap_pyfunction!(log_factorial, m)?)?;
    m.add_function(wrap_pyfunction!(log_binomial, m)?)?;
    m.add_function(wrap_pyfunction!(log_sum_exp, m)?)?;
    m.add_function(wrap_pyfunction!(log_z, m)?)?;
    m.add_function(wrap_pyfunction!(log_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(pmf_row, m)?)?;
    m.add_function(wrap_pyfunction!(loglik_simple, m)?)?;
    m.add_function(wrap_pyfunction!(loglik_binomial, m)?)?;
    m.add_function(wrap_pyfunction!(loglik_combinomial, m)?)?;
    m.add_function(wrap_pyfunction!(posterior, m)?)?;
    m.add_function(wrap_pyfunction!(demographic_range, m)?)?;
    Ok(())
}
