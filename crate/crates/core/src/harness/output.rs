//! CSV and JSON result tables.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::ExperimentResult;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "experiment_id,algorithm,L,K,M,lambda,sigma_sh_db,n_layouts,n_fading_draws,\
master_seed,mean_ee,ci95_ee,mean_sum_rate,mean_min_rate,mean_rate_variance,bound_ee_exact,bound_ee_approx,lambda_star";

const SIG_DIGITS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::config(format!("unknown output format '{other}'"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Renders `v` with `SIG_DIGITS` significant digits, in plain notation for
/// moderate magnitudes and exponent notation otherwise.
fn format_float(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn round_sig(v: f64) -> f64 {
    format_float(v).parse().unwrap_or(v)
}

fn format_opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

fn rounded(row: &ExperimentResult) -> ExperimentResult {
    ExperimentResult {
        lambda: round_sig(row.lambda),
        sigma_sh_db: round_sig(row.sigma_sh_db),
        mean_ee: round_sig(row.mean_ee),
        ci95_ee: round_sig(row.ci95_ee),
        mean_sum_rate: round_sig(row.mean_sum_rate),
        mean_min_rate: round_sig(row.mean_min_rate),
        mean_rate_variance: round_sig(row.mean_rate_variance),
        bound_ee_exact: row.bound_ee_exact.map(round_sig),
        bound_ee_approx: row.bound_ee_approx.map(round_sig),
        lambda_star: row.lambda_star.map(round_sig),
        ..row.clone()
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::invalid(format!("csv: {e}"))
}

pub fn render_results(table: &[ExperimentResult], format: OutputFormat) -> Result<String> {
    if table.is_empty() {
        return Err(Error::invalid("result table is empty"));
    }
    match format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(Vec::new());
            w.write_record(CSV_HEADER.split(',')).map_err(csv_error)?;
            for r in table {
                w.write_record([
                    r.experiment_id.clone(),
                    r.algorithm.clone(),
                    r.l.to_string(),
                    r.k.to_string(),
                    r.m.to_string(),
                    format_float(r.lambda),
                    format_float(r.sigma_sh_db),
                    r.n_layouts.to_string(),
                    r.n_fading_draws.to_string(),
                    r.master_seed.to_string(),
                    format_float(r.mean_ee),
                    format_float(r.ci95_ee),
                    format_float(r.mean_sum_rate),
                    format_float(r.mean_min_rate),
                    format_float(r.mean_rate_variance),
                    format_opt(r.bound_ee_exact),
                    format_opt(r.bound_ee_approx),
                    format_opt(r.lambda_star),
                ])
                .map_err(csv_error)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        OutputFormat::Json => {
            let rows: Vec<ExperimentResult> = table.iter().map(rounded).collect();
            Ok(serde_json::to_string_pretty(&rows)? + "\n")
        }
    }
}

/// Writes the table to `path`.
pub fn emit_results(
    table: &[ExperimentResult],
    format: OutputFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let text = render_results(table, format)?;
    std::fs::write(path, text)?;
    Ok(())
}

fn field<T: FromStr>(rec: &csv::StringRecord, idx: usize) -> Result<T> {
    let raw = rec.get(idx).unwrap_or("");
    raw.parse().map_err(|_| {
        Error::invalid(format!(
            "bad value '{raw}' in column {}",
            CSV_HEADER.split(',').nth(idx).unwrap_or("?")
        ))
    })
}

fn opt_field(rec: &csv::StringRecord, idx: usize) -> Result<Option<f64>> {
    match rec.get(idx) {
        None | Some("") => Ok(None),
        Some(_) => field(rec, idx).map(Some),
    }
}

/// Parses a table produced by [`render_results`].
pub fn parse_results(text: &str, format: OutputFormat) -> Result<Vec<ExperimentResult>> {
    match format {
        OutputFormat::Json => Ok(serde_json::from_str(text)?),
        OutputFormat::Csv => {
            let mut rdr = csv::ReaderBuilder::new()
                .has_headers(true)
                .from_reader(text.as_bytes());
            let header = rdr
                .headers()
                .map_err(csv_error)?
                .iter()
                .collect::<Vec<_>>()
                .join(",");
            if header != CSV_HEADER {
                return Err(Error::invalid(format!("unexpected header '{header}'")));
            }
            rdr.records()
                .map(|rec| {
                    let rec = rec.map_err(csv_error)?;
                    Ok(ExperimentResult {
                        experiment_id: field(&rec, 0)?,
                        algorithm: field(&rec, 1)?,
                        l: field(&rec, 2)?,
                        k: field(&rec, 3)?,
                        m: field(&rec, 4)?,
                        lambda: field(&rec, 5)?,
                        sigma_sh_db: field(&rec, 6)?,
                        n_layouts: field(&rec, 7)?,
                        n_fading_draws: field(&rec, 8)?,
                        master_seed: field(&rec, 9)?,
                        mean_ee: field(&rec, 10)?,
                        ci95_ee: field(&rec, 11)?,
                        mean_sum_rate: field(&rec, 12)?,
                        mean_min_rate: field(&rec, 13)?,
                        mean_rate_variance: field(&rec, 14)?,
                        bound_ee_exact: opt_field(&rec, 15)?,
                        bound_ee_approx: opt_field(&rec, 16)?,
                        lambda_star: opt_field(&rec, 17)?,
                    })
                })
                .collect()
        }
    }
}
