//! Family-wide boundedness constants.
//!
//! `Gamma >= 1` must satisfy `sup_x Theta_k(x) v sup_{x,y} |k(x, y)| <= Gamma n`
//! for every kernel of the family; `Upsilon` is the larger constant that also
//! involves `||s||_inf` of the true density.

use serde::Serialize;

use super::{family_of, BasisSpec, Family, KernelModel};
use crate::density::KnownDensity;
use crate::error::{Error, Result};

/// Suprema behind a [`GammaReport`], maximized over the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaDetail {
    pub sup_kernel: f64,
    pub sup_theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaReport {
    pub gamma: f64,
    pub condition_holds: bool,
    pub detail: GammaDetail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpsilonReport {
    pub upsilon_lower: f64,
    pub gamma: f64,
    pub components: Vec<(String, f64)>,
}

/// Upper bound on `sup_x sum_i w_i^power phi_i(x)^2`.
fn weighted_diag_sup(basis: &BasisSpec, weights: &[f64], power: i32) -> f64 {
    match *basis {
        BasisSpec::RegularHistogram { dim } => {
            dim as f64 * weights.iter().map(|w| w.powi(power)).fold(0.0, f64::max)
        }
        BasisSpec::Fourier { p } => {
            weights[0].powi(power)
                + (1..=p / 2)
                    .map(|j| {
                        2.0 * weights[2 * j - 1]
                            .powi(power)
                            .max(weights[2 * j].powi(power))
                    })
                    .sum::<f64>()
        }
    }
}

pub fn gamma_bound(family: &[KernelModel], n: usize) -> Result<GammaReport> {
    if n == 0 {
        return Err(Error::config("sample size must be positive"));
    }
    let kind = family_of(family)?;
    for k in family {
        k.validate()?;
    }
    let nf = n as f64;
    let report = match kind {
        Family::Projection => {
            // Theta = chi for projections, and |k(x, y)| <= sqrt(chi(x) chi(y)).
            let sup = family
                .iter()
                .filter_map(|k| k.basis_weights().map(|(b, _)| b.sup_sum_sq()))
                .fold(0.0, f64::max);
            GammaReport {
                gamma: 1f64.max(sup / nf),
                condition_holds: true,
                detail: GammaDetail {
                    sup_kernel: sup,
                    sup_theta: sup,
                },
            }
        }
        Family::WeightedProjection => {
            let mut sup_basis = 0f64;
            let mut sup_kernel = 0f64;
            let mut sup_theta = 0f64;
            for k in family {
                if let KernelModel::WeightedProjection { basis, weights } = k {
                    sup_basis = sup_basis.max(basis.sup_sum_sq());
                    sup_kernel = sup_kernel.max(weighted_diag_sup(basis, weights, 1));
                    sup_theta = sup_theta.max(weighted_diag_sup(basis, weights, 2));
                }
            }
            GammaReport {
                gamma: 1f64.max(sup_basis / nf),
                condition_holds: true,
                detail: GammaDetail {
                    sup_kernel,
                    sup_theta,
                },
            }
        }
        Family::Parzen => {
            let mut holds = true;
            let mut sup_kernel = 0f64;
            let mut sup_theta = 0f64;
            for k in family {
                if let KernelModel::Parzen { base, h } = k {
                    let sup = base.sup_norm();
                    holds &= *h >= sup * base.l1_norm() / nf;
                    sup_kernel = sup_kernel.max(sup / h);
                    sup_theta = sup_theta.max(base.l2_norm_sq() / h);
                }
            }
            GammaReport {
                gamma: 1.0,
                condition_holds: holds,
                detail: GammaDetail {
                    sup_kernel,
                    sup_theta,
                },
            }
        }
    };
    Ok(report)
}

/// Smallest admissible `Upsilon` for the family against a known density.
pub fn upsilon_bound(
    family: &[KernelModel],
    density: KnownDensity,
    n: usize,
) -> Result<UpsilonReport> {
    let sup_s = density.sup_norm();
    if !sup_s.is_finite() {
        return Err(Error::UnsupportedDensity(density.name().to_string()));
    }
    let gamma = gamma_bound(family, n)?;
    let report = match family_of(family)? {
        Family::Projection | Family::WeightedProjection => {
            let v = gamma.gamma * (1.0 + sup_s);
            UpsilonReport {
                upsilon_lower: v,
                gamma: gamma.gamma,
                components: vec![("gamma_times_one_plus_sup_s".to_string(), v)],
            }
        }
        Family::Parzen => {
            let mut ratio = 0f64;
            let mut mass = 0f64;
            for k in family {
                if let KernelModel::Parzen { base, .. } = k {
                    ratio = ratio.max(base.at_zero() / base.l2_norm_sq());
                    mass = mass.max(1.0 + 2.0 * sup_s * base.l1_norm().powi(2));
                }
            }
            UpsilonReport {
                upsilon_lower: ratio.max(mass),
                gamma: gamma.gamma,
                components: vec![
                    ("k0_over_l2_norm_sq".to_string(), ratio),
                    ("one_plus_two_sup_s_l1_sq".to_string(), mass),
                ],
            }
        }
    };
    Ok(report)
}
