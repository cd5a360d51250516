//! Seeded Monte-Carlo penalty sweeps.
//!
//! Each replication draws a fresh sample from a known density with a seed
//! derived from the master seed, computes the penalty-independent criterion
//! terms once, and then selects a kernel for every penalty in the sweep. The
//! true risk of every kernel in the family is recorded so the selected risk can
//! be compared with the family oracle.
//!
//! Seeds are derived with the SplitMix64 finalizer:
//!
//! ```text
//! z = master + 0x9E3779B97F4A7C15 * (index + 1)      (wrapping)
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! seed = z ^ (z >> 31)
//! ```
//!
//! The finalizer is a bijection of `u64` and the increment is odd, so seeds are
//! distinct for distinct indices below `2^64`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criterion::{family_stats, select_from_stats, PenaltyRule, Sample};
use crate::density::KnownDensity;
use crate::error::{Error, Result};
use crate::kernels::{BaseKernel, KernelModel};
use crate::oracle::Oracle;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed of replication `index` under `master_seed`.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    let mut z = master_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    ParzenKappaSweep,
    HistogramKappaSweep,
    BiasDominant,
}

/// `{1/(2i), i = 1..50}`.
pub fn standard_bandwidths() -> Vec<f64> {
    (1..=50).map(|i| 1.0 / (2.0 * i as f64)).collect()
}

/// 41 equispaced points on `[-1, 1]`.
pub fn default_kappa_grid() -> Vec<f64> {
    (-20..=20).map(|i| i as f64 / 20.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub density: KnownDensity,
    /// Bump half-distance of the Parzen base kernel.
    pub a: f64,
    pub bandwidths: Vec<f64>,
    /// Largest histogram dimension; defaults to `n`.
    pub max_dim: Option<usize>,
    /// Dimension grid exponent for the bias-dominant scenario.
    pub beta: f64,
    pub kappa_grid: Vec<f64>,
    pub replications: usize,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn parzen(a: f64) -> Self {
        ExperimentConfig {
            scenario: Scenario::ParzenKappaSweep,
            n: 100,
            density: KnownDensity::StdGaussian,
            a,
            bandwidths: standard_bandwidths(),
            max_dim: None,
            beta: 0.3,
            kappa_grid: default_kappa_grid(),
            replications: 50,
            master_seed: 0,
        }
    }

    pub fn histogram(density: KnownDensity) -> Self {
        ExperimentConfig {
            scenario: Scenario::HistogramKappaSweep,
            density,
            ..Self::parzen(0.0)
        }
    }

    pub fn bias_dominant(beta: f64) -> Self {
        ExperimentConfig {
            scenario: Scenario::BiasDominant,
            density: KnownDensity::Triangular2x,
            beta,
            kappa_grid: vec![-0.5, 0.0, 1.0],
            ..Self::parzen(0.0)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_replications(mut self, reps: usize) -> Self {
        self.replications = reps;
        self
    }

    pub fn with_kappas(mut self, kappas: Vec<f64>) -> Self {
        self.kappa_grid = kappas;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::config("sample size must be at least 2"));
        }
        if self.replications == 0 {
            return Err(Error::config("replications must be at least 1"));
        }
        if self.kappa_grid.is_empty() || self.kappa_grid.iter().any(|k| !k.is_finite()) {
            return Err(Error::config("kappa grid must be non-empty and finite"));
        }
        match self.scenario {
            Scenario::ParzenKappaSweep => {
                if self.bandwidths.is_empty() {
                    return Err(Error::config("bandwidth grid is empty"));
                }
                if !(self.a.is_finite() && self.a >= 0.0) {
                    return Err(Error::config(format!(
                        "a must be non-negative, got {}",
                        self.a
                    )));
                }
            }
            Scenario::HistogramKappaSweep => {
                if !self.density.on_unit_interval() {
                    return Err(Error::config("histogram sweeps need a density on [0, 1]"));
                }
                if self.max_dim == Some(0) {
                    return Err(Error::config("dimension grid is empty"));
                }
            }
            Scenario::BiasDominant => {
                if !(self.beta > 0.0 && self.beta < 1.0 / 3.0) {
                    return Err(Error::config(format!(
                        "bias-dominant scenario needs 0 < beta < 1/3, got {}",
                        self.beta
                    )));
                }
                if self.density != KnownDensity::Triangular2x {
                    return Err(Error::config(
                        "bias-dominant scenario uses the triangular density",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Largest dimension `floor(n^beta)` of the bias-dominant grid.
    pub fn bias_dominant_max_dim(&self) -> usize {
        ((self.n as f64).powf(self.beta).floor() as usize).max(1)
    }

    /// The kernel family swept over, with the parameter that labels each kernel.
    pub fn family(&self) -> Result<Vec<(KernelModel, f64)>> {
        self.validate()?;
        match self.scenario {
            Scenario::ParzenKappaSweep => self
                .bandwidths
                .iter()
                .map(|&h| Ok((KernelModel::parzen(BaseKernel::two_bump(self.a), h)?, h)))
                .collect(),
            Scenario::HistogramKappaSweep => (1..=self.max_dim.unwrap_or(self.n))
                .map(|d| Ok((KernelModel::histogram(d)?, d as f64)))
                .collect(),
            Scenario::BiasDominant => (1..=self.bias_dominant_max_dim())
                .map(|d| Ok((KernelModel::histogram(d)?, d as f64)))
                .collect(),
        }
    }
}

/// One selection made in one replication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pick {
    pub selected_index: usize,
    pub criterion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replication {
    pub index: usize,
    pub seed: u64,
    /// `||s_hat_k - s||^2` for every kernel of the family.
    pub family_risks: Vec<f64>,
    /// One pick per penalty rule, in the order the rules were given.
    pub picks: Vec<Pick>,
}

impl Replication {
    pub fn oracle_risk(&self) -> f64 {
        self.family_risks
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn oracle_index(&self) -> usize {
        let best = self.oracle_risk();
        self.family_risks
            .iter()
            .position(|&r| r == best)
            .unwrap_or(0)
    }
}

/// Runs every replication of `cfg` and selects with each of `rules`.
pub fn run_replications(cfg: &ExperimentConfig, rules: &[PenaltyRule]) -> Result<Vec<Replication>> {
    let family: Vec<KernelModel> = cfg.family()?.into_iter().map(|(k, _)| k).collect();
    (0..cfg.replications)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(cfg.master_seed, r as u64);
            let sample = Sample::new(cfg.density.sample(cfg.n, seed))?;
            let stats = family_stats(&family, &sample)?;
            let family_risks = family
                .iter()
                .zip(&stats)
                .map(|(k, st)| {
                    Oracle::new(k, cfg.density)?.true_risk_expanded(&sample, Some(st.sum_composed))
                })
                .collect::<Result<Vec<_>>>()?;
            let picks = rules
                .iter()
                .map(|rule| {
                    let sel = select_from_stats(&family, &stats, cfg.n, rule)?;
                    Ok(Pick {
                        selected_index: sel.selected_index,
                        criterion: sel.selected().criterion,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Replication {
                index: r,
                seed,
                family_risks,
                picks,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub kappa: f64,
    pub replication: usize,
    pub selected_index: usize,
    /// Bandwidth `h` or dimension `D` of the selected kernel.
    pub selected_param: f64,
    /// `P Theta` of the selected kernel.
    pub complexity: f64,
    pub criterion: f64,
    pub risk: f64,
    pub oracle_risk: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaSummary {
    pub kappa: f64,
    pub median_complexity: f64,
    pub median_risk_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    pub rows: Vec<SweepRow>,
    pub summaries: Vec<KappaSummary>,
}

impl SweepResult {
    pub fn summary(&self, kappa: f64) -> Option<&KappaSummary> {
        self.summaries.iter().find(|s| s.kappa == kappa)
    }

    /// Recomputes the per-kappa medians from the rows.
    pub fn recompute_summaries(&self) -> Vec<KappaSummary> {
        summarize(&self.config.kappa_grid, &self.rows)
    }

    /// Median of `f(row)` over the rows at `kappa`.
    pub fn median_of(&self, kappa: f64, f: impl Fn(&SweepRow) -> f64) -> Option<f64> {
        let v: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.kappa == kappa)
            .map(f)
            .collect();
        median(&v)
    }
}

fn summarize(kappas: &[f64], rows: &[SweepRow]) -> Vec<KappaSummary> {
    kappas
        .iter()
        .map(|&kappa| {
            let at: Vec<&SweepRow> = rows.iter().filter(|r| r.kappa == kappa).collect();
            let c: Vec<f64> = at.iter().map(|r| r.complexity).collect();
            let q: Vec<f64> = at.iter().map(|r| r.risk / r.oracle_risk).collect();
            KappaSummary {
                kappa,
                median_complexity: median(&c).unwrap_or(f64::NAN),
                median_risk_ratio: median(&q).unwrap_or(f64::NAN),
            }
        })
        .collect()
}

/// Median, averaging the two middle values for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

/// Kappa sweep with `MinimalPlusKappa` penalties for whichever scenario `cfg` names.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let family = cfg.family()?;
    let rules: Vec<PenaltyRule> = cfg
        .kappa_grid
        .iter()
        .map(|&k| PenaltyRule::MinimalPlusKappa(k))
        .collect();
    let reps = run_replications(cfg, &rules)?;
    let mut rows = Vec::with_capacity(rules.len() * reps.len());
    for (ki, &kappa) in cfg.kappa_grid.iter().enumerate() {
        for rep in &reps {
            let pick = rep.picks[ki];
            let (k, param) = &family[pick.selected_index];
            rows.push(SweepRow {
                kappa,
                replication: rep.index,
                selected_index: pick.selected_index,
                selected_param: *param,
                complexity: k.constant_theta().unwrap_or(f64::NAN),
                criterion: pick.criterion,
                risk: rep.family_risks[pick.selected_index],
                oracle_risk: rep.oracle_risk(),
            });
        }
    }
    let summaries = summarize(&cfg.kappa_grid, &rows);
    Ok(SweepResult {
        config: cfg.clone(),
        rows,
        summaries,
    })
}

fn expect_scenario(cfg: &ExperimentConfig, want: Scenario) -> Result<()> {
    if cfg.scenario != want {
        return Err(Error::config(format!(
            "expected scenario {want:?}, got {:?}",
            cfg.scenario
        )));
    }
    Ok(())
}

pub fn run_parzen_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    expect_scenario(cfg, Scenario::ParzenKappaSweep)?;
    run_sweep(cfg)
}

pub fn run_histogram_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    expect_scenario(cfg, Scenario::HistogramKappaSweep)?;
    run_sweep(cfg)
}

pub fn run_bias_dominant(cfg: &ExperimentConfig) -> Result<SweepResult> {
    expect_scenario(cfg, Scenario::BiasDominant)?;
    run_sweep(cfg)
}

/// Where the median complexity jumps the most between adjacent kappas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseTransition {
    pub kappa_before: f64,
    pub kappa_after: f64,
    /// Drop in median complexity across the jump.
    pub jump: f64,
    /// `max - min` of the median complexities.
    pub range: f64,
    pub straddles_zero: bool,
    /// Jump above 25% of the range and straddling `kappa = 0`.
    pub detected: bool,
}

/// Locates the largest adjacent drop of median complexity over an increasing kappa grid.
pub fn phase_transition(summaries: &[KappaSummary]) -> Option<PhaseTransition> {
    if summaries.len() < 2 {
        return None;
    }
    let med: Vec<f64> = summaries.iter().map(|s| s.median_complexity).collect();
    let max = med.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = med.iter().copied().fold(f64::INFINITY, f64::min);
    let (mut at, mut jump) = (0, f64::NEG_INFINITY);
    for i in 0..med.len() - 1 {
        let d = med[i] - med[i + 1];
        if d > jump {
            jump = d;
            at = i;
        }
    }
    let (before, after) = (summaries[at].kappa, summaries[at + 1].kappa);
    let straddles_zero = before <= 0.0 && after >= 0.0;
    let range = max - min;
    Some(PhaseTransition {
        kappa_before: before,
        kappa_after: after,
        jump,
        range,
        straddles_zero,
        detected: straddles_zero && jump > 0.25 * range,
    })
}

/// Number of adjacent kappa pairs where the median complexity increases.
pub fn monotonicity_inversions(summaries: &[KappaSummary]) -> usize {
    summaries
        .windows(2)
        .filter(|w| w[1].median_complexity > w[0].median_complexity)
        .count()
}
