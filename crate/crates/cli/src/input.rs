//! File ingestion and argument parsers.
//!
//! Distribution and channel files are either JSON (`{"probs": [...]}`,
//! `{"rows": [[...], ...]}`) or headerless CSV with one row per line. A
//! file whose first non-blank character is `{` is read as JSON.

use std::path::Path;

use sdpi_core::{Channel, Distribution};
use serde::de::DeserializeOwned;

use crate::CliError;

fn read(path: &Path, field: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{field}: cannot read {}: {e}", path.display())))
}

fn from_json<T: DeserializeOwned>(text: &str, field: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{field}: {e}")))
}

fn csv_rows(text: &str, field: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rows = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .enumerate()
            .map(|(col, cell)| {
                cell.trim().parse::<f64>().map_err(|_| {
                    CliError::Input(format!(
                        "{field}: line {}, column {}: cannot parse {:?} as a number",
                        line_no + 1,
                        col + 1,
                        cell.trim()
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Input(format!("{field}: file is empty")));
    }
    Ok(rows)
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

pub fn parse_distribution(text: &str, field: &str) -> Result<Distribution, CliError> {
    if is_json(text) {
        return from_json(text, field);
    }
    let rows = csv_rows(text, field)?;
    // a single line, or a single column
    let probs = if rows.len() == 1 {
        rows.into_iter().next().expect("one row")
    } else if rows.iter().all(|r| r.len() == 1) {
        rows.into_iter().flatten().collect()
    } else {
        return Err(CliError::Input(format!(
            "{field}: expected one row or one column of probabilities, found {} rows",
            rows.len()
        )));
    };
    Distribution::new(probs).map_err(|e| CliError::Input(format!("{field}: {e}")))
}

pub fn parse_channel(text: &str, field: &str) -> Result<Channel, CliError> {
    if is_json(text) {
        return from_json(text, field);
    }
    Channel::new(csv_rows(text, field)?).map_err(|e| CliError::Input(format!("{field}: {e}")))
}

pub fn read_distribution(path: &Path, field: &str) -> Result<Distribution, CliError> {
    parse_distribution(&read(path, field)?, field)
}

pub fn read_channel(path: &Path, field: &str) -> Result<Channel, CliError> {
    parse_channel(&read(path, field)?, field)
}

/// Positive privacy level: a plain number, or a natural log written as
/// `log2`, `log(2)`, `ln2`, `ln(2)` or `log 2`.
pub fn parse_epsilon(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let value = if let Some(arg) = t.strip_prefix("log").or_else(|| t.strip_prefix("ln")) {
        let arg = arg.trim();
        let arg = arg
            .strip_prefix('(')
            .and_then(|a| a.strip_suffix(')'))
            .unwrap_or(arg)
            .trim();
        let x: f64 = arg.parse().map_err(|_| format!("cannot parse {arg:?} inside {t:?}"))?;
        if !(x > 0.0) {
            return Err(format!("log argument must be positive, got {x}"));
        }
        x.ln()
    } else {
        t.parse().map_err(|_| format!("cannot parse {t:?} as a number or log(x)"))?
    };
    if !(value > 0.0 && value.is_finite()) {
        return Err(format!("epsilon must be positive and finite, got {value}"));
    }
    Ok(value)
}

/// Rejects empty and unsorted grids.
pub fn check_grid<T: PartialOrd + std::fmt::Debug>(name: &str, grid: &[T]) -> Result<(), CliError> {
    if grid.is_empty() {
        return Err(CliError::Input(format!("{name}: grid is empty")));
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[0] <= w[1])) {
        return Err(CliError::Input(format!("{name}: grid is not sorted ({:?} before {:?})", w[0], w[1])));
    }
    Ok(())
}
