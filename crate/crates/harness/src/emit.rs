//! Plot-data emission. The CSV column order is fixed; floats are written in
//! shortest round-trip form so parsing them back reproduces the in-memory
//! values exactly and seeded runs emit byte-identical files.

use std::path::Path;

use crate::runner::{Scheme, SweepRow};
use crate::{HarnessError, Result};

pub const CSV_COLUMNS: &str = "axis_name,axis_value,scheme,N,epsilon_e,mean_sinr_bob_db,\
mean_sinr_eve_db,mean_ser_eve,mean_secrecy_rate,stderr_secrecy_rate,num_draws,seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Json,
}

impl std::str::FromStr for EmitFormat {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(EmitFormat::Csv),
            "json" => Ok(EmitFormat::Json),
            other => Err(HarnessError::Config(format!(
                "unknown format '{other}' (expected csv or json)"
            ))),
        }
    }
}

pub fn to_csv_string(rows: &[SweepRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(HarnessError::Config(
            "refusing to emit an empty result set".into(),
        ));
    }
    let mut out = String::from(CSV_COLUMNS);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.axis_name,
            r.axis_value,
            r.scheme.name(),
            r.n,
            r.epsilon_e,
            r.mean_sinr_bob_db,
            r.mean_sinr_eve_db,
            r.mean_ser_eve,
            r.mean_secrecy_rate,
            r.stderr_secrecy_rate,
            r.num_draws,
            r.seed
        ));
    }
    Ok(out)
}

pub fn to_json_string(rows: &[SweepRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(HarnessError::Config(
            "refusing to emit an empty result set".into(),
        ));
    }
    Ok(serde_json::to_string_pretty(rows)?)
}

/// Writes rows to `path` in the requested format.
pub fn emit(rows: &[SweepRow], path: &Path, format: EmitFormat) -> Result<()> {
    let body = match format {
        EmitFormat::Csv => to_csv_string(rows)?,
        EmitFormat::Json => to_json_string(rows)?,
    };
    std::fs::write(path, body).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses a CSV produced by [`to_csv_string`]; used by round-trip checks.
pub fn parse_csv(body: &str) -> Result<Vec<SweepRow>> {
    let mut lines = body.lines();
    let header = lines
        .next()
        .ok_or_else(|| HarnessError::Config("empty CSV".into()))?;
    if header != CSV_COLUMNS {
        return Err(HarnessError::Config(format!(
            "unexpected CSV header: {header}"
        )));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(HarnessError::Config(format!(
                "line {}: expected 12 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let parse_f = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|e| {
                HarnessError::Config(format!("line {}: bad {what} '{s}': {e}", lineno + 2))
            })
        };
        rows.push(SweepRow {
            axis_name: fields[0].to_string(),
            axis_value: parse_f(fields[1], "axis_value")?,
            scheme: fields[2].parse::<Scheme>()?,
            n: fields[3]
                .parse()
                .map_err(|e| HarnessError::Config(format!("bad N: {e}")))?,
            epsilon_e: parse_f(fields[4], "epsilon_e")?,
            mean_sinr_bob_db: parse_f(fields[5], "mean_sinr_bob_db")?,
            mean_sinr_eve_db: parse_f(fields[6], "mean_sinr_eve_db")?,
            mean_ser_eve: parse_f(fields[7], "mean_ser_eve")?,
            mean_secrecy_rate: parse_f(fields[8], "mean_secrecy_rate")?,
            stderr_secrecy_rate: parse_f(fields[9], "stderr_secrecy_rate")?,
            num_draws: fields[10]
                .parse()
                .map_err(|e| HarnessError::Config(format!("bad num_draws: {e}")))?,
            seed: fields[11]
                .parse()
                .map_err(|e| HarnessError::Config(format!("bad seed: {e}")))?,
            anti_intercept_audit_pass: true, // not carried by the CSV schema
        });
    }
    Ok(rows)
}
