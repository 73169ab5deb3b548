use std::fmt::Write as _;
use std::path::Path;

use dualsys_core::{pmf_row, ComBinomialParams, DemographicInputs};
use serde::Serialize;

use crate::error::CliError;
use crate::format::{fmt_g, round_sig};
use crate::run::write_file;

/// Com-binomial probabilities for every `(p, ν)` panel, one row per `j`.
pub fn figure3_csv(p_values: &[f64], nu_values: &[f64], m: usize) -> Result<String, CliError> {
    if p_values.is_empty() || nu_values.is_empty() {
        return Err(CliError::Config("figure3 needs at least one p and one nu value".into()));
    }
    let mut out = String::from("panel_p,panel_nu,j,probability\n");
    for &p in p_values {
        for &nu in nu_values {
            let params = ComBinomialParams::from_p(m, p, nu)
                .map_err(|e| CliError::Config(e.to_string()))?;
            for (j, prob) in pmf_row(&params).iter().enumerate() {
                let _ = writeln!(out, "{},{},{j},{}", fmt_g(p), fmt_g(nu), fmt_g(*prob));
            }
        }
    }
    Ok(out)
}

pub fn emit_figure3_panels(p_values: &[f64], nu_values: &[f64], m: usize, out: &Path) -> Result<(), CliError> {
    let body = figure3_csv(p_values, nu_values, m)?;
    write_file(out, &body)
}

#[derive(Serialize)]
struct SegmentRow {
    population: f64,
    years: f64,
    person_years: f64,
}

#[derive(Serialize)]
struct Bounds {
    low: f64,
    high: f64,
}

#[derive(Serialize)]
struct DemographicsReport {
    rate_low: f64,
    rate_high: f64,
    segments: Vec<SegmentRow>,
    raw: Bounds,
    rounded: Bounds,
}

pub fn demographics_json(inputs: &DemographicInputs) -> Result<String, CliError> {
    let range = dualsys_core::demographic_range(inputs)?;
    let body = DemographicsReport {
        rate_low: inputs.rate_low,
        rate_high: inputs.rate_high,
        segments: inputs
            .segments
            .iter()
            .zip(&range.person_years)
            .map(|(s, py)| SegmentRow {
                population: s.population,
                years: s.years,
                person_years: *py,
            })
            .collect(),
        raw: Bounds {
            low: round_sig(range.low),
            high: round_sig(range.high),
        },
        rounded: Bounds {
            low: range.low_rounded,
            high: range.high_rounded,
        },
    };
    let mut json = serde_json::to_string_pretty(&body)
        .map_err(|e| CliError::Runtime(format!("serializing demographics: {e}")))?;
    json.push('\n');
    Ok(json)
}

pub fn emit_demographics(inputs: &DemographicInputs, out: &Path) -> Result<(), CliError> {
    let body = demographics_json(inputs)?;
    write_file(out, &body)
}
