use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use dualsys_core::{CaptureTable, Model, NuisanceGrid, PosteriorDistribution, PriorSpec, QuantileReport};
use serde::Serialize;

use crate::error::CliError;
use crate::format::{fmt_g, round_sig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Simple,
    Binomial,
    Combinomial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "snake_case")]
pub enum Emit {
    PosteriorCsv,
    ReportJson,
    FigureData,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// `None` selects the bundled table.
    pub data_path: Option<PathBuf>,
    pub model: ModelKind,
    pub total_min: Option<u64>,
    pub total_max: Option<u64>,
    pub p_points: Option<usize>,
    pub nu_min: Option<f64>,
    pub nu_points: Option<usize>,
    pub output_dir: PathBuf,
    pub emit: Vec<Emit>,
    pub timing: bool,
}

impl RunConfig {
    pub fn resolve_model(&self) -> Result<Model, CliError> {
        let grid_flags = self.p_points.is_some() || self.nu_min.is_some() || self.nu_points.is_some();
        match self.model {
            ModelKind::Simple | ModelKind::Binomial if grid_flags => Err(CliError::Config(
                "--p-points, --nu-min and --nu-points apply only to --model combinomial".into(),
            )),
            ModelKind::Simple => Ok(Model::Simple),
            ModelKind::Binomial => Ok(Model::Binomial),
            ModelKind::Combinomial => {
                let default = NuisanceGrid::default();
                let grid = NuisanceGrid {
                    p_points: self.p_points.unwrap_or(default.p_points),
                    nu_min: self.nu_min.unwrap_or(default.nu_min),
                    nu_points: self.nu_points.unwrap_or(default.nu_points),
                };
                grid.validate()?;
                Ok(Model::ComBinomial(grid))
            }
        }
    }

    pub fn resolve_prior(&self, model: &Model, observed_total: u64) -> Result<PriorSpec, CliError> {
        let default = model.default_prior(observed_total);
        let prior = PriorSpec::new(
            self.total_min.unwrap_or(default.total_min),
            self.total_max.unwrap_or(default.total_max),
        );
        prior.validate(observed_total)?;
        Ok(prior)
    }
}

#[derive(Serialize)]
struct PriorEcho {
    total_min: u64,
    total_max: u64,
}

#[derive(Serialize)]
struct ConfigEcho {
    data: String,
    model: ModelKind,
    total_min: u64,
    total_max: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nu_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nu_points: Option<usize>,
    emit: Vec<Emit>,
}

#[derive(Serialize)]
struct Report {
    model: &'static str,
    prior: PriorEcho,
    observed_total: u64,
    deciles: BTreeMap<String, u64>,
    median: u64,
    mean: f64,
    config: ConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_ms: Option<u64>,
}

/// Runs inference, prints the decile table and returns the files written.
pub fn run(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let started = Instant::now();
    let model = config.resolve_model()?;
    let table = match &config.data_path {
        Some(path) => CaptureTable::load(path, dualsys_core::capture_data::DEFAULT_MAX_LETTERS)
            .map_err(CliError::Data)?,
        None => CaptureTable::bundled(),
    };
    let observed = table.observed_total();
    let prior = config.resolve_prior(&model, observed)?;

    let posterior = model.posterior(&table, &prior)?;
    let report = posterior.decile_report();

    print!("{}", decile_table(model.name(), &prior, &report));

    let mut written = Vec::new();
    if !config.emit.is_empty() {
        fs::create_dir_all(&config.output_dir)
            .map_err(|e| CliError::io(&format!("creating {}", config.output_dir.display()), e))?;
    }
    let mut emits = config.emit.clone();
    emits.sort();
    emits.dedup();
    for emit in emits {
        let (name, body) = match emit {
            Emit::PosteriorCsv => (format!("posterior_{}.csv", model.name()), posterior_csv(&posterior)),
            Emit::FigureData => (format!("figure_{}.csv", model.name()), figure_csv(&posterior)),
            Emit::ReportJson => {
                let runtime = config.timing.then(|| started.elapsed().as_millis() as u64);
                let json = report_json(config, &model, &prior, observed, &report, runtime)?;
                (format!("report_{}.json", model.name()), json)
            }
        };
        let path = config.output_dir.join(name);
        write_file(&path, &body)?;
        written.push(path);
    }

    Ok(written)
}

pub fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::io(&format!("writing {}", path.display()), e))
}

/// The decile table in two rows, quantile over probability.
pub fn decile_table(model: &str, prior: &PriorSpec, report: &QuantileReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "model: {model}, uniform prior on total over [{}, {}]",
        prior.total_min, prior.total_max
    );
    let _ = write!(out, "{:<12}", "Quantile");
    for (_, total) in &report.deciles {
        let _ = write!(out, "{total:>7}");
    }
    let _ = write!(out, "\n{:<12}", "Probability");
    for (q, _) in &report.deciles {
        let _ = write!(out, "{q:>7.1}");
    }
    let _ = writeln!(out, "\nmedian {}  mean {}", report.median, fmt_g(round_sig(report.mean)));
    out
}

/// `total,log_weight,prob`, log-weights shifted so the largest is zero.
pub fn posterior_csv(posterior: &PosteriorDistribution) -> String {
    let max = posterior
        .log_weights()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut out = String::from("total,log_weight,prob\n");
    for ((total, w), p) in posterior.totals().zip(posterior.log_weights()).zip(posterior.probs()) {
        let _ = writeln!(out, "{total},{},{}", fmt_g(w - max), fmt_g(*p));
    }
    out
}

pub fn figure_csv(posterior: &PosteriorDistribution) -> String {
    let mut out = String::from("total,probability\n");
    for (total, p) in posterior.totals().zip(posterior.probs()) {
        let _ = writeln!(out, "{total},{}", fmt_g(*p));
    }
    out
}

fn report_json(
    config: &RunConfig,
    model: &Model,
    prior: &PriorSpec,
    observed_total: u64,
    report: &QuantileReport,
    runtime_ms: Option<u64>,
) -> Result<String, CliError> {
    let grid = match model {
        Model::ComBinomial(g) => Some(*g),
        _ => None,
    };
    let mut emit = config.emit.clone();
    emit.sort();
    emit.dedup();
    let body = Report {
        model: model.name(),
        prior: PriorEcho {
            total_min: prior.total_min,
            total_max: prior.total_max,
        },
        observed_total,
        deciles: report
            .deciles
            .iter()
            .map(|(q, t)| (format!("{q:.1}"), *t))
            .collect(),
        median: report.median,
        mean: round_sig(report.mean),
        config: ConfigEcho {
            data: config
                .data_path
                .as_ref()
                .map_or_else(|| "<bundled>".to_string(), |p| p.display().to_string()),
            model: config.model,
            total_min: prior.total_min,
            total_max: prior.total_max,
            p_points: grid.map(|g| g.p_points),
            nu_min: grid.map(|g| round_sig(g.nu_min)),
            nu_points: grid.map(|g| g.nu_points),
            emit,
        },
        runtime_ms,
    };
    let mut json = serde_json::to_string_pretty(&body)
        .map_err(|e| CliError::Runtime(format!("serializing report: {e}")))?;
    json.push('\n');
    Ok(json)
}
