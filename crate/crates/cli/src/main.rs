use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dualsys_core::{DemographicInputs, Segment};

mod error;
mod figures;
mod format;
mod run;
mod self_check;

use error::CliError;
use run::{Emit, ModelKind, RunConfig};

/// Bayesian dual-systems estimates of an unrecorded event count.
#[derive(Parser)]
#[command(name = "dualsys", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the posterior of the total count under one model.
    Run(RunArgs),
    /// Write com-binomial probabilities for a grid of (p, nu) panels.
    Figure3(Figure3Args),
    /// Expected killings implied by population and homicide-rate ranges.
    Demographics(DemographicsArgs),
    /// Compare closed-form likelihoods with brute-force quadrature.
    SelfCheck(SelfCheckArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Capture table CSV (`mentioned_other,letters,count`); defaults to the bundled table.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: ModelKind,
    /// Lower bound of the uniform prior on the total (default: observed total).
    #[arg(long)]
    total_min: Option<u64>,
    /// Upper bound of the uniform prior on the total (default: 25000 simple, 5850 otherwise).
    #[arg(long)]
    total_max: Option<u64>,
    /// Midpoint nodes for p on (0, 1), combinomial only (default: 400).
    #[arg(long)]
    p_points: Option<usize>,
    /// Lower end of the uniform nu grid on [nu_min, 1], combinomial only (default: -5).
    #[arg(long, allow_hyphen_values = true)]
    nu_min: Option<f64>,
    /// Nodes on the nu grid, endpoints included, combinomial only (default: 241).
    #[arg(long)]
    nu_points: Option<usize>,
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    /// Files to write into the output directory.
    #[arg(long, value_enum, value_delimiter = ',')]
    emit: Vec<Emit>,
    /// Record wall-clock time in the JSON report (makes it non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct Figure3Args {
    /// Comma-separated success probabilities, one panel row each.
    #[arg(long = "p", value_delimiter = ',', default_value = "0.1,0.5,0.9")]
    p_values: Vec<f64>,
    /// Comma-separated dispersion values, one panel column each.
    #[arg(long = "nu", value_delimiter = ',', allow_hyphen_values = true, default_value = "-2,0,1,3")]
    nu_values: Vec<f64>,
    /// Number of trials.
    #[arg(long, default_value_t = 5)]
    m: usize,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DemographicsArgs {
    /// `POPULATION:YEARS`, repeatable (default: 330000:50 and 130000:219).
    #[arg(long = "segment", value_parser = parse_segment)]
    segments: Vec<Segment>,
    /// Killings per 100,000 persons per year.
    #[arg(long, default_value_t = 8.0)]
    rate_low: f64,
    /// Killings per 100,000 persons per year.
    #[arg(long, default_value_t = 13.0)]
    rate_high: f64,
    /// Output JSON path; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelfCheckArgs {
    /// Quadrature points per axis for the small-table checks.
    #[arg(long, default_value_t = 2048)]
    points: usize,
}

fn parse_segment(s: &str) -> Result<Segment, String> {
    let (pop, years) = s
        .split_once(':')
        .ok_or_else(|| format!("expected POPULATION:YEARS, got `{s}`"))?;
    let population = pop.trim().parse().map_err(|_| format!("bad population `{pop}`"))?;
    let years = years.trim().parse().map_err(|_| format!("bad years `{years}`"))?;
    Ok(Segment { population, years })
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("DUALSYS_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| CliError::Config(format!("DUALSYS_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Runtime(format!("starting worker pool: {e}")))
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(args) => {
            let config = RunConfig {
                data_path: args.data,
                model: args.model,
                total_min: args.total_min,
                total_max: args.total_max,
                p_points: args.p_points,
                nu_min: args.nu_min,
                nu_points: args.nu_points,
                output_dir: args.output_dir,
                emit: args.emit,
                timing: args.timing,
            };
            for path in run::run(&config)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Figure3(args) => {
            figures::emit_figure3_panels(&args.p_values, &args.nu_values, args.m, &args.out)?;
            eprintln!("wrote {}", args.out.display());
            Ok(())
        }
        Command::Demographics(args) => {
            let segments = if args.segments.is_empty() {
                DemographicInputs::rural_norway().segments
            } else {
                args.segments
            };
            let inputs = DemographicInputs {
                segments,
                rate_low: args.rate_low,
                rate_high: args.rate_high,
            };
            match args.out {
                Some(path) => {
                    figures::emit_demographics(&inputs, &path)?;
                    eprintln!("wrote {}", path.display());
                }
                None => print!("{}", figures::demographics_json(&inputs)?),
            }
            Ok(())
        }
        Command::SelfCheck(args) => {
            let checks = self_check::run_checks(args.points)?;
            let mut failed = 0;
            for check in &checks {
                let status = if check.passed() { "PASS" } else { "FAIL" };
                println!(
                    "{status}  {:<34} error {:.3e} (tolerance {:.0e})",
                    check.name, check.error, check.tolerance
                );
                if !check.passed() {
                    failed += 1;
                }
            }
            if failed > 0 {
                return Err(CliError::Runtime(format!("{failed} self-check(s) failed")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| execute(cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("dualsys: {err}");
            err.exit_code()
        }
    }
}
