//! Penalized least-squares criterion and kernel selection.
//!
//! For a kernel `k` and sample `X_1..X_n` the empirical contrast is
//! `P_n gamma(s_k) = ||s_k||^2 - 2 P_n s_k = (1/n^2) sum_{i,j} (A - 2k)(X_i, X_j)`,
//! where both double sums run over all ordered pairs, diagonal included. The
//! selected kernel minimizes `contrast + pen(k)`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelModel;

/// I.i.d. observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::data("sample is empty"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!("observation {} is not finite", i + 1)));
        }
        Ok(Sample { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Every observation must lie in the kernel's domain.
    pub fn check_for(&self, k: &KernelModel) -> Result<()> {
        for (i, &x) in self.values.iter().enumerate() {
            if k.check_point(x).is_err() {
                return Err(Error::data(format!(
                    "observation {} ({x}) is outside the domain of {}",
                    i + 1,
                    k.label()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum PenaltyRule {
    /// `2 chi / n` with `chi` the constant diagonal.
    OptimalTheoretical,
    /// `2 P_n chi / n`.
    OptimalEmpirical,
    /// `(2 chi - Theta) / n`.
    Minimal,
    /// `(2 chi - Theta) / n + kappa Theta / n`.
    MinimalPlusKappa(f64),
    /// One penalty per kernel, by family index.
    ExplicitTable(Vec<f64>),
}

impl PenaltyRule {
    /// The unpenalized criterion as an explicit table.
    pub fn zeros(len: usize) -> Self {
        PenaltyRule::ExplicitTable(vec![0.0; len])
    }
}

impl fmt::Display for PenaltyRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PenaltyRule::OptimalTheoretical => write!(f, "optimal"),
            PenaltyRule::OptimalEmpirical => write!(f, "optimal-empirical"),
            PenaltyRule::Minimal => write!(f, "minimal"),
            PenaltyRule::MinimalPlusKappa(k) => write!(f, "kappa:{k}"),
            PenaltyRule::ExplicitTable(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "table:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for PenaltyRule {
    type Err = Error;

    /// Accepts `optimal`, `optimal-empirical`, `minimal`, `kappa:<k>`,
    /// and `table:<v1>,<v2>,...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |what: &str| Error::config(format!("invalid penalty '{s}': {what}"));
        match s {
            "optimal" => return Ok(PenaltyRule::OptimalTheoretical),
            "optimal-empirical" => return Ok(PenaltyRule::OptimalEmpirical),
            "minimal" => return Ok(PenaltyRule::Minimal),
            _ => {}
        }
        if let Some(v) = s.strip_prefix("kappa:") {
            let k: f64 = v.trim().parse().map_err(|_| bad("kappa is not a number"))?;
            if !k.is_finite() {
                return Err(bad("kappa must be finite"));
            }
            return Ok(PenaltyRule::MinimalPlusKappa(k));
        }
        if let Some(v) = s.strip_prefix("table:") {
            let values = v
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad("table entry is not a number"))?;
            return Ok(PenaltyRule::ExplicitTable(values));
        }
        Err(bad(
            "expected optimal, optimal-empirical, minimal, kappa:<k>, table:<values>",
        ))
    }
}

/// Sample-dependent quantities of one kernel that do not depend on the penalty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelStats {
    /// `P_n gamma(s_k)`.
    pub contrast: f64,
    /// `sum_{i,j} k(X_i, X_j)`.
    pub sum_kernel: f64,
    /// `sum_{i,j} A(X_i, X_j)`.
    pub sum_composed: f64,
    /// `P_n chi`.
    pub chi_mean_empirical: f64,
    /// `P Theta` when `Theta` is constant, `P_n Theta` otherwise.
    pub complexity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionRow {
    pub criterion: f64,
    pub contrast: f64,
    pub penalty: f64,
    pub complexity_ptheta: f64,
    pub chi_mean_empirical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult {
    pub selected_index: usize,
    pub rows: Vec<SelectionRow>,
    pub tie_broken: bool,
}

impl SelectionResult {
    pub fn selected(&self) -> &SelectionRow {
        &self.rows[self.selected_index]
    }
}

/// `s_k(x) = (1/n) sum_i k(X_i, x)`.
pub fn estimate_at(k: &KernelModel, sample: &Sample, x: f64) -> Result<f64> {
    k.check_point(x)?;
    sample.check_for(k)?;
    let v = sample.values();
    Ok(v.iter().map(|&xi| k.eval_unchecked(xi, x)).sum::<f64>() / v.len() as f64)
}

/// Diagonal plus twice the strict upper triangle of `f(X_i, X_j)`.
pub(crate) fn symmetric_pair_sum(values: &[f64], f: impl Fn(f64, f64) -> f64) -> f64 {
    let mut diag = 0.0;
    let mut off = 0.0;
    for (i, &xi) in values.iter().enumerate() {
        diag += f(xi, xi);
        for &xj in &values[i + 1..] {
            off += f(xi, xj);
        }
    }
    diag + 2.0 * off
}

pub fn kernel_stats(k: &KernelModel, sample: &Sample) -> Result<KernelStats> {
    k.validate()?;
    sample.check_for(k)?;
    let v = sample.values();
    let nf = v.len() as f64;
    let sum_kernel = symmetric_pair_sum(v, |x, y| k.eval_unchecked(x, y));
    let sum_composed = symmetric_pair_sum(v, |x, y| k.a_unchecked(x, y));
    let chi_mean_empirical = v.iter().map(|&x| k.eval_unchecked(x, x)).sum::<f64>() / nf;
    let complexity = match k.constant_theta() {
        Some(t) => t,
        None => v.iter().map(|&x| k.a_unchecked(x, x)).sum::<f64>() / nf,
    };
    Ok(KernelStats {
        contrast: (sum_composed - 2.0 * sum_kernel) / (nf * nf),
        sum_kernel,
        sum_composed,
        chi_mean_empirical,
        complexity,
    })
}

/// `P_n gamma(s_k)` by the exact double sum.
pub fn empirical_contrast(k: &KernelModel, sample: &Sample) -> Result<f64> {
    Ok(kernel_stats(k, sample)?.contrast)
}

/// Stats for every kernel, computed in parallel and returned in family order.
pub fn family_stats(family: &[KernelModel], sample: &Sample) -> Result<Vec<KernelStats>> {
    family.par_iter().map(|k| kernel_stats(k, sample)).collect()
}

fn constant_functionals(rule: &PenaltyRule, k: &KernelModel) -> Result<(f64, f64)> {
    match (k.constant_chi(), k.constant_theta()) {
        (Some(c), Some(t)) => Ok((c, t)),
        _ => Err(Error::RuleUnavailable {
            rule: rule.to_string(),
            kernel: k.label(),
        }),
    }
}

/// Penalty of the kernel at position `index` given `n` and `P_n chi`.
pub fn penalty_from_stats(
    rule: &PenaltyRule,
    k: &KernelModel,
    index: usize,
    n: usize,
    chi_mean_empirical: f64,
) -> Result<f64> {
    let nf = n as f64;
    match rule {
        PenaltyRule::OptimalTheoretical => {
            let (chi, _) = constant_functionals(rule, k)?;
            Ok(2.0 * chi / nf)
        }
        PenaltyRule::OptimalEmpirical => Ok(2.0 * chi_mean_empirical / nf),
        PenaltyRule::Minimal => {
            let (chi, theta) = constant_functionals(rule, k)?;
            Ok((2.0 * chi - theta) / nf)
        }
        PenaltyRule::MinimalPlusKappa(kappa) => {
            let (chi, theta) = constant_functionals(rule, k)?;
            Ok((2.0 * chi - theta) / nf + kappa * theta / nf)
        }
        PenaltyRule::ExplicitTable(values) => values
            .get(index)
            .copied()
            .ok_or_else(|| Error::config(format!("penalty table has no entry for kernel {index}"))),
    }
}

pub fn penalty_value(
    rule: &PenaltyRule,
    k: &KernelModel,
    sample: &Sample,
    index: usize,
) -> Result<f64> {
    sample.check_for(k)?;
    let v = sample.values();
    let chi_mean = v.iter().map(|&x| k.eval_unchecked(x, x)).sum::<f64>() / v.len() as f64;
    penalty_from_stats(rule, k, index, v.len(), chi_mean)
}

/// Selection from precomputed stats, so a penalty sweep reuses one pass over the pairs.
pub fn select_from_stats(
    family: &[KernelModel],
    stats: &[KernelStats],
    n: usize,
    rule: &PenaltyRule,
) -> Result<SelectionResult> {
    if family.is_empty() {
        return Err(Error::config("kernel family is empty"));
    }
    if stats.len() != family.len() {
        return Err(Error::config("stats and family differ in length"));
    }
    if let PenaltyRule::ExplicitTable(values) = rule {
        if values.len() != family.len() {
            return Err(Error::config(format!(
                "penalty table has {} entries for {} kernels",
                values.len(),
                family.len()
            )));
        }
    }
    let rows = family
        .iter()
        .zip(stats)
        .enumerate()
        .map(|(i, (k, st))| {
            let penalty = penalty_from_stats(rule, k, i, n, st.chi_mean_empirical)?;
            Ok(SelectionRow {
                criterion: st.contrast + penalty,
                contrast: st.contrast,
                penalty,
                complexity_ptheta: st.complexity,
                chi_mean_empirical: st.chi_mean_empirical,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (selected_index, tie_broken) = argmin_with_ties(&rows);
    Ok(SelectionResult {
        selected_index,
        rows,
        tie_broken,
    })
}

// Exact equality only; ties go to the smallest complexity, then the smallest index.
fn argmin_with_ties(rows: &[SelectionRow]) -> (usize, bool) {
    let best = rows
        .iter()
        .map(|r| r.criterion)
        .fold(f64::INFINITY, f64::min);
    let minimizers: Vec<usize> = (0..rows.len())
        .filter(|&i| rows[i].criterion == best)
        .collect();
    let mut pick = minimizers[0];
    for &i in &minimizers[1..] {
        if rows[i].complexity_ptheta < rows[pick].complexity_ptheta {
            pick = i;
        }
    }
    (pick, minimizers.len() > 1)
}

/// `argmin_k { P_n gamma(s_k) + pen(k) }`.
pub fn select(
    family: &[KernelModel],
    sample: &Sample,
    rule: &PenaltyRule,
) -> Result<SelectionResult> {
    if family.is_empty() {
        return Err(Error::config("kernel family is empty"));
    }
    let stats = family_stats(family, sample)?;
    select_from_stats(family, &stats, sample.len(), rule)
}
