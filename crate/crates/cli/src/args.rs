//! Command-line arguments. Every subcommand may also read a JSON config file
//! with the same field names (snake_case); flags override it.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use kernsel::experiments::{default_kappa_grid, standard_bandwidths};
use kernsel::{BaseKernel, KernelModel, KnownDensity, PenaltyRule};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "kernsel",
    version,
    about = "Penalized least-squares kernel selection for density estimation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select a kernel for a sample and write selection.csv.
    Select(SelectArgs),
    /// Run a seeded Monte-Carlo kappa sweep and write sweep.csv and sweep_summary.csv.
    Sweep(SweepArgs),
    /// Compare every kernel of a family against a known density and write diagnostics.json.
    Diagnose(DiagnoseArgs),
    /// Draw a seeded sample from a known density.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    Parzen,
    Histogram,
    Fourier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityArg {
    StdGaussian,
    Uniform,
    Triangular,
}

impl From<DensityArg> for KnownDensity {
    fn from(d: DensityArg) -> Self {
        match d {
            DensityArg::StdGaussian => KnownDensity::StdGaussian,
            DensityArg::Uniform => KnownDensity::Uniform01,
            DensityArg::Triangular => KnownDensity::Triangular2x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioArg {
    Parzen,
    Histogram,
    BiasDominant,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Bump half-distance of the Parzen base kernel [default: 0].
    #[arg(long)]
    pub a: Option<f64>,
    /// `standard` for {1/(2i), i = 1..50} or a comma-separated list [default: standard].
    #[arg(long)]
    pub h_grid: Option<String>,
    /// Dimensions as `lo-hi` or a comma-separated list; Fourier sizes must be odd.
    #[arg(long)]
    pub dims: Option<String>,
    /// optimal, optimal-empirical, minimal, kappa:<k>, table:<v,...> or none [default: optimal].
    #[arg(long)]
    pub penalty: Option<String>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Read a CSV file and take this column (header name or 0-based index).
    #[arg(long)]
    pub column: Option<String>,
    /// Output directory [default: .].
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub h_grid: Option<String>,
    #[arg(long)]
    pub dims: Option<String>,
    /// The true density the sample was drawn from.
    #[arg(long, value_enum)]
    pub density: Option<DensityArg>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioArg>,
    /// Sample size [default: 100].
    #[arg(long)]
    pub n: Option<usize>,
    /// Replications [default: 50].
    #[arg(long)]
    pub reps: Option<usize>,
    /// Master seed; falls back to KERNSEL_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Density for histogram sweeps [default: triangular].
    #[arg(long, value_enum)]
    pub density: Option<DensityArg>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub h_grid: Option<String>,
    /// Largest histogram dimension [default: n].
    #[arg(long)]
    pub max_dim: Option<usize>,
    /// Exponent of the bias-dominant dimension grid {1..floor(n^beta)} [default: 0.3].
    #[arg(long)]
    pub beta: Option<f64>,
    /// `default` (41 points on [-1, 1]) or a comma-separated list.
    #[arg(long)]
    pub kappa_grid: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub density: Option<DensityArg>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; the sample goes to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

/// Overlays the flags that were given on top of the config file, if any.
pub fn resolve<T: Serialize + DeserializeOwned>(flags: T, config: Option<&Path>) -> Result<T> {
    let Some(path) = config else {
        return Ok(flags);
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    let from_file: T = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("invalid config {}: {e}", path.display())))?;
    let mut merged = to_object(&from_file)?;
    for (k, v) in to_object(&flags)? {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::config(e.to_string()))
}

fn to_object<T: Serialize>(t: &T) -> Result<serde_json::Map<String, Value>> {
    match serde_json::to_value(t).map_err(|e| CliError::config(e.to_string()))? {
        Value::Object(m) => Ok(m),
        _ => Err(CliError::config("arguments must serialize to an object")),
    }
}

/// Names of the fields left unset by both flags and config.
pub fn unset_fields<T: Serialize>(t: &T) -> Vec<String> {
    to_object(t)
        .map(|m| {
            m.into_iter()
                .filter(|(_, v)| v.is_null())
                .map(|(k, _)| k)
                .collect()
        })
        .unwrap_or_default()
}

/// Seed from flag or config, then `KERNSEL_SEED`, then 0.
pub fn resolve_seed(seed: Option<u64>) -> Result<u64> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var("KERNSEL_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::config(format!("KERNSEL_SEED '{v}' is not an unsigned integer"))
        }),
        Err(_) => Ok(0),
    }
}

fn parse_floats(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::config(format!("invalid {what} entry '{}'", t.trim())))
        })
        .collect()
}

pub fn parse_h_grid(s: Option<&str>) -> Result<Vec<f64>> {
    match s.map(str::trim) {
        None | Some("standard") | Some("paper") => Ok(standard_bandwidths()),
        Some(list) => parse_floats(list, "bandwidth"),
    }
}

pub fn parse_kappa_grid(s: Option<&str>) -> Result<Vec<f64>> {
    match s.map(str::trim) {
        None | Some("default") => Ok(default_kappa_grid()),
        Some(list) => parse_floats(list, "kappa"),
    }
}

pub fn parse_dims(s: &str) -> Result<Vec<usize>> {
    let bad = || CliError::config(format!("invalid dimension list '{s}'"));
    if let Some((lo, hi)) = s.split_once('-') {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo == 0 || hi < lo {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| bad()))
        .collect()
}

/// Kernel family from the shared family flags; `n` sets the default dimension range.
pub fn build_family(
    family: Option<FamilyArg>,
    a: Option<f64>,
    h_grid: Option<&str>,
    dims: Option<&str>,
    n: usize,
) -> Result<Vec<KernelModel>> {
    let family = family.ok_or_else(|| CliError::config("--family is required"))?;
    let out: kernsel::Result<Vec<KernelModel>> = match family {
        FamilyArg::Parzen => {
            let base = BaseKernel::two_bump(a.unwrap_or(0.0));
            parse_h_grid(h_grid)?
                .into_iter()
                .map(|h| KernelModel::parzen(base, h))
                .collect()
        }
        FamilyArg::Histogram => {
            let dims = match dims {
                Some(d) => parse_dims(d)?,
                None => (1..=n.max(1)).collect(),
            };
            dims.into_iter().map(KernelModel::histogram).collect()
        }
        FamilyArg::Fourier => {
            let dims = match dims {
                Some(d) => parse_dims(d)?,
                None => (1..=n.max(1)).step_by(2).collect(),
            };
            dims.into_iter().map(KernelModel::fourier).collect()
        }
    };
    let out = out?;
    if out.is_empty() {
        return Err(CliError::config("kernel family is empty"));
    }
    Ok(out)
}

pub fn parse_penalty(s: Option<&str>, family_len: usize) -> Result<PenaltyRule> {
    match s.map(str::trim) {
        None => Ok(PenaltyRule::OptimalTheoretical),
        Some("none") => Ok(PenaltyRule::zeros(family_len)),
        Some(p) => Ok(p.parse()?),
    }
}
