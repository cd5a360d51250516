//! Sample files: one float per line with `#` comments, or a CSV column.

use std::fs;
use std::path::Path;

use kernsel::report::fmt_float;

use crate::error::{CliError, Result};

pub fn read_sample(path: &Path, column: Option<&str>) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    match column {
        None => parse_lines(&text, path),
        Some(c) => parse_csv_column(&text, c, path),
    }
}

fn parse_value(token: &str, line: u64, path: &Path) -> Result<f64> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(CliError::data(format!(
            "{}:{line}: value '{token}' is not finite",
            path.display()
        ))),
        Err(_) => Err(CliError::data(format!(
            "{}:{line}: cannot parse '{token}' as a number",
            path.display()
        ))),
    }
}

pub fn parse_lines(text: &str, path: &Path) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if !body.is_empty() {
            out.push(parse_value(body, i as u64 + 1, path)?);
        }
    }
    Ok(out)
}

fn parse_csv_column(text: &str, column: &str, path: &Path) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
        .clone();
    let idx = headers
        .iter()
        .position(|h| h == column)
        .or_else(|| column.parse::<usize>().ok().filter(|&i| i < headers.len()))
        .ok_or_else(|| {
            CliError::config(format!("column '{column}' not found in {}", path.display()))
        })?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        let line = rec.position().map_or(0, |p| p.line());
        let token = rec.get(idx).ok_or_else(|| {
            CliError::data(format!(
                "{}:{line}: missing column '{column}'",
                path.display()
            ))
        })?;
        out.push(parse_value(token, line, path)?);
    }
    Ok(out)
}

/// The sampler's file format, which [`read_sample`] reads back exactly.
pub fn render_sample(values: &[f64], header: &str) -> String {
    let mut s = format!("# {header}\n");
    for v in values {
        s.push_str(&fmt_float(*v));
        s.push('\n');
    }
    s
}
