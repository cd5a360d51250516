//! Kernel families and their pointwise functionals.
//!
//! A kernel `k(x, y)` generates the estimator `s_k(x) = (1/n) sum_i k(X_i, x)`.
//! Besides `k` itself every family exposes the diagonal `chi(x) = k(x, x)`, the
//! self-composition `A(x, y) = int k(x, z) k(z, y) dz` and its diagonal
//! `Theta(x) = A(x, x)`, all in closed form:
//!
//! | family              | `k(x, y)`                 | `A(x, y)`                     |
//! |---------------------|---------------------------|-------------------------------|
//! | projection          | `sum phi_i(x) phi_i(y)`   | `k(x, y)`                     |
//! | weighted projection | `sum w_i phi_i(x) phi_i(y)` | `sum w_i^2 phi_i(x) phi_i(y)` |
//! | Parzen              | `K((x - y) / h) / h`      | `(K * K)((x - y) / h) / h`    |
//!
//! Basis kernels live on `[0, 1]` and reject points outside it.

mod base;
mod basis;
mod bounds;

use std::borrow::Cow;

use serde::{Deserialize, Serialize};

pub(crate) use base::normal_pdf;
pub use base::BaseKernel;
pub use basis::BasisSpec;
pub use bounds::{gamma_bound, upsilon_bound, GammaDetail, GammaReport, UpsilonReport};

use crate::error::{Error, Result};
use crate::quadrature::Integrator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelModel {
    Projection { basis: BasisSpec },
    Parzen { base: BaseKernel, h: f64 },
    WeightedProjection { basis: BasisSpec, weights: Vec<f64> },
}

/// Which of the three families a kernel belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Projection,
    Parzen,
    WeightedProjection,
}

impl KernelModel {
    pub fn histogram(dim: usize) -> Result<Self> {
        let k = KernelModel::Projection {
            basis: BasisSpec::RegularHistogram { dim },
        };
        k.validate()?;
        Ok(k)
    }

    pub fn fourier(p: usize) -> Result<Self> {
        let k = KernelModel::Projection {
            basis: BasisSpec::Fourier { p },
        };
        k.validate()?;
        Ok(k)
    }

    pub fn parzen(base: BaseKernel, h: f64) -> Result<Self> {
        let k = KernelModel::Parzen { base, h };
        k.validate()?;
        Ok(k)
    }

    pub fn weighted(basis: BasisSpec, weights: Vec<f64>) -> Result<Self> {
        let k = KernelModel::WeightedProjection { basis, weights };
        k.validate()?;
        Ok(k)
    }

    /// Weighted Fourier kernel with paired weights: `w_0` on the constant and
    /// `tau_j` on both `cos(2 pi j x)` and `sin(2 pi j x)`.
    pub fn fourier_paired(w0: f64, tau: &[f64]) -> Result<Self> {
        let p = 1 + 2 * tau.len();
        let mut weights = Vec::with_capacity(p);
        weights.push(w0);
        for &t in tau {
            weights.push(t);
            weights.push(t);
        }
        Self::weighted(BasisSpec::Fourier { p }, weights)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            KernelModel::Projection { basis } => {
                if !basis.is_valid() {
                    return Err(Error::config(format!("invalid basis {basis:?}")));
                }
            }
            KernelModel::Parzen { base, h } => {
                if !base.is_valid() {
                    return Err(Error::config(format!("invalid base kernel {base:?}")));
                }
                if !(h.is_finite() && *h > 0.0) {
                    return Err(Error::config(format!(
                        "bandwidth must be positive, got {h}"
                    )));
                }
            }
            KernelModel::WeightedProjection { basis, weights } => {
                if !basis.is_valid() {
                    return Err(Error::config(format!("invalid basis {basis:?}")));
                }
                if weights.len() != basis.size() {
                    return Err(Error::config(format!(
                        "weight vector has length {} but the basis has {} functions",
                        weights.len(),
                        basis.size()
                    )));
                }
                if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
                    return Err(Error::config(format!("weight {w} is outside [0, 1]")));
                }
            }
        }
        Ok(())
    }

    pub fn family(&self) -> Family {
        match self {
            KernelModel::Projection { .. } => Family::Projection,
            KernelModel::Parzen { .. } => Family::Parzen,
            KernelModel::WeightedProjection { .. } => Family::WeightedProjection,
        }
    }

    pub fn label(&self) -> String {
        match self {
            KernelModel::Projection { basis } => basis.label(),
            KernelModel::Parzen { base, h } => format!("parzen(a={},h={})", base.shift(), h),
            KernelModel::WeightedProjection { basis, weights } => {
                let w: Vec<String> = weights.iter().map(|w| w.to_string()).collect();
                format!("weighted-{}[{}]", basis.label(), w.join(" "))
            }
        }
    }

    /// True for kernels defined on `[0, 1]` only.
    pub fn on_unit_interval(&self) -> bool {
        !matches!(self, KernelModel::Parzen { .. })
    }

    /// The basis and its weights (all ones for plain projections).
    pub fn basis_weights(&self) -> Option<(BasisSpec, Cow<'_, [f64]>)> {
        match self {
            KernelModel::Projection { basis } => {
                Some((*basis, Cow::Owned(vec![1.0; basis.size()])))
            }
            KernelModel::WeightedProjection { basis, weights } => {
                Some((*basis, Cow::Borrowed(weights)))
            }
            KernelModel::Parzen { .. } => None,
        }
    }

    /// Checks that `x` lies in the kernel's domain.
    pub fn check_point(&self, x: f64) -> Result<()> {
        if !x.is_finite() || (self.on_unit_interval() && !(0.0..=1.0).contains(&x)) {
            return Err(Error::Domain { x });
        }
        Ok(())
    }

    /// `k(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(self.eval_unchecked(x, y))
    }

    /// `chi(x) = k(x, x)`.
    pub fn chi(&self, x: f64) -> Result<f64> {
        self.eval(x, x)
    }

    /// `A(x, y) = int k(x, z) k(z, y) dz`, in closed form.
    pub fn a_eval(&self, x: f64, y: f64) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(self.a_unchecked(x, y))
    }

    /// `Theta(x) = A(x, x)`.
    pub fn theta(&self, x: f64) -> Result<f64> {
        self.a_eval(x, x)
    }

    pub(crate) fn eval_unchecked(&self, x: f64, y: f64) -> f64 {
        match self {
            KernelModel::Parzen { base, h } => base.eval((x - y) / h) / h,
            KernelModel::Projection { basis } => match *basis {
                BasisSpec::RegularHistogram { dim } => {
                    if BasisSpec::bin(dim, x) == BasisSpec::bin(dim, y) {
                        dim as f64
                    } else {
                        0.0
                    }
                }
                BasisSpec::Fourier { p } => {
                    // sum over pairs of 2 cos(2 pi j (x - y))
                    let t = 2.0 * std::f64::consts::PI * (x - y);
                    1.0 + (1..=p / 2).map(|j| 2.0 * (j as f64 * t).cos()).sum::<f64>()
                }
            },
            KernelModel::WeightedProjection { basis, weights } => {
                weighted_sum(basis, weights, x, y, 1)
            }
        }
    }

    pub(crate) fn a_unchecked(&self, x: f64, y: f64) -> f64 {
        match self {
            KernelModel::Parzen { base, h } => base.self_convolution((x - y) / h) / h,
            KernelModel::Projection { .. } => self.eval_unchecked(x, y),
            KernelModel::WeightedProjection { basis, weights } => {
                weighted_sum(basis, weights, x, y, 2)
            }
        }
    }

    /// `A(x, y)` by direct quadrature of `int k(x, z) k(z, y) dz`; the cross-check path.
    pub fn a_by_quadrature(&self, x: f64, y: f64) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        let f = |z: f64| self.eval_unchecked(x, z) * self.eval_unchecked(z, y);
        match self {
            KernelModel::Parzen { base, h } => {
                let r = base.effective_radius() * h;
                Integrator::default().with_max_panel(*h).integrate(
                    f,
                    x.min(y) - r,
                    x.max(y) + r,
                    &[x, y],
                )
            }
            _ => Integrator::default().integrate(f, 0.0, 1.0, &self.breakpoints()),
        }
    }

    /// Interior discontinuities of `z -> k(x, z)` on `[0, 1]`.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            KernelModel::Projection { basis } | KernelModel::WeightedProjection { basis, .. } => {
                basis.breakpoints()
            }
            KernelModel::Parzen { .. } => Vec::new(),
        }
    }

    /// `chi` when it does not depend on `x`.
    pub fn constant_chi(&self) -> Option<f64> {
        self.constant_diagonal(1)
    }

    /// `Theta` when it does not depend on `x`.
    pub fn constant_theta(&self) -> Option<f64> {
        self.constant_diagonal(2)
    }

    fn constant_diagonal(&self, power: i32) -> Option<f64> {
        match self {
            KernelModel::Parzen { base, h } => Some(if power == 1 {
                base.at_zero() / h
            } else {
                base.l2_norm_sq() / h
            }),
            KernelModel::Projection { basis } => Some(basis.size() as f64),
            KernelModel::WeightedProjection { basis, weights } => match *basis {
                BasisSpec::RegularHistogram { dim } => {
                    let w0 = weights[0];
                    weights
                        .iter()
                        .all(|&w| w == w0)
                        .then(|| dim as f64 * w0.powi(power))
                }
                BasisSpec::Fourier { p } => {
                    let paired = (1..=p / 2).all(|j| weights[2 * j - 1] == weights[2 * j]);
                    paired.then(|| weights.iter().map(|w| w.powi(power)).sum())
                }
            },
        }
    }
}

/// `sum_i w_i^power phi_i(x) phi_i(y)`.
fn weighted_sum(basis: &BasisSpec, weights: &[f64], x: f64, y: f64, power: i32) -> f64 {
    match *basis {
        BasisSpec::RegularHistogram { dim } => {
            let b = BasisSpec::bin(dim, x);
            if b == BasisSpec::bin(dim, y) {
                dim as f64 * weights[b].powi(power)
            } else {
                0.0
            }
        }
        BasisSpec::Fourier { p } => {
            let two_pi = 2.0 * std::f64::consts::PI;
            let mut acc = weights[0].powi(power);
            for j in 1..=p / 2 {
                let (sx, cx) = (two_pi * j as f64 * x).sin_cos();
                let (sy, cy) = (two_pi * j as f64 * y).sin_cos();
                acc += 2.0
                    * (weights[2 * j - 1].powi(power) * cx * cy
                        + weights[2 * j].powi(power) * sx * sy);
            }
            acc
        }
    }
}

/// Checks that every kernel in a family belongs to the same variant.
pub fn family_of(family: &[KernelModel]) -> Result<Family> {
    let first = family
        .first()
        .ok_or_else(|| Error::config("kernel family is empty"))?
        .family();
    if family.iter().any(|k| k.family() != first) {
        return Err(Error::config("kernel family mixes different variants"));
    }
    Ok(first)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k0(h: f64) -> KernelModel {
        KernelModel::parzen(BaseKernel::Gaussian, h).unwrap()
    }

    #[test]
    fn parzen_at_origin() {
        assert!((k0(1.0).eval(0.0, 0.0).unwrap() - 0.398_942_3).abs() < 1e-7);
        assert!((k0(0.5).chi(0.3).unwrap() - 0.797_884_6).abs() < 1e-7);
    }

    #[test]
    fn histogram_same_and_different_bins() {
        let k = KernelModel::histogram(4).unwrap();
        assert_eq!(k.eval(0.1, 0.2).unwrap(), 4.0);
        assert_eq!(k.eval(0.1, 0.3).unwrap(), 0.0);
        assert_eq!(KernelModel::histogram(7).unwrap().chi(0.61).unwrap(), 7.0);
    }

    #[test]
    fn fourier_paired_chi_uses_the_expanded_basis() {
        // w0 + 2 tau: the cos and sin terms both contribute.
        let k = KernelModel::fourier_paired(1.0, &[1.0]).unwrap();
        for x in [0.0, 0.13, 0.5, 0.77] {
            assert!((k.chi(x).unwrap() - 3.0).abs() < 1e-12);
        }
        assert_eq!(k.constant_chi(), Some(3.0));
        let k = KernelModel::fourier_paired(1.0, &[0.5]).unwrap();
        assert_eq!(k.constant_theta(), Some(1.5));
        assert!((k.theta(0.31).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn parzen_theta_closed_forms() {
        assert!((k0(0.5).theta(1.0).unwrap() - 0.564_189_6).abs() < 1e-7);
        let k2 = KernelModel::parzen(BaseKernel::two_bump(2.0), 0.1).unwrap();
        assert!((k2.theta(0.0).unwrap() - 1.436_307_69).abs() < 1e-7);
        // |x - y| = 2 at h = 1: N(0, 2) density at 2.
        assert!((k0(1.0).a_eval(0.0, 2.0).unwrap() - 0.103_776_9).abs() < 1e-7);
    }

    #[test]
    fn basis_kernels_reject_points_outside_unit_interval() {
        let k = KernelModel::histogram(3).unwrap();
        assert_eq!(k.eval(1.2, 0.5), Err(Error::Domain { x: 1.2 }));
        assert!(k.theta(-0.1).is_err());
        assert!(k0(1.0).eval(-5.0, 12.0).is_ok());
        assert!(k0(1.0).eval(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(KernelModel::parzen(BaseKernel::Gaussian, 0.0).is_err());
        assert!(KernelModel::parzen(BaseKernel::two_bump(-1.0), 1.0).is_err());
        assert!(KernelModel::fourier(4).is_err());
        assert!(KernelModel::histogram(0).is_err());
        assert!(KernelModel::weighted(BasisSpec::Fourier { p: 3 }, vec![1.0, 0.5]).is_err());
        assert!(KernelModel::weighted(BasisSpec::Fourier { p: 3 }, vec![1.0, 0.5, 1.5]).is_err());
    }

    #[test]
    fn unpaired_fourier_weights_have_no_constant_chi() {
        let k = KernelModel::weighted(BasisSpec::Fourier { p: 3 }, vec![1.0, 1.0, 0.0]).unwrap();
        assert_eq!(k.constant_chi(), None);
        let c0 = k.chi(0.0).unwrap();
        let c1 = k.chi(0.25).unwrap();
        assert!((c0 - 3.0).abs() < 1e-12 && (c1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_family_is_a_config_error() {
        let fam = vec![KernelModel::histogram(2).unwrap(), k0(1.0)];
        assert!(matches!(family_of(&fam), Err(Error::Config(_))));
        assert!(family_of(&[]).is_err());
    }
}
