//! Oracle-mode diagnostics against a known true density `s`.
//!
//! With `s_k(x) = E[k(X, x)]` the smoothed density, the risk of the estimator
//! splits into the bias `||s - s_k||^2`, the estimation error
//! `||s_hat - s_k||^2` (about `P Theta / n`) and a cross term. The estimation
//! error further satisfies the exact identity
//! `||s_k - s_hat||^2 = P_n zeta / n + U_A / n^2` with
//! `zeta(x) = Theta(x) - 2 F_A(x) + ||s_k||^2`, `F_A(x) = E[A(X, x)]` and the
//! centered, degenerate U-statistic `U_A` built from `A`.
//!
//! Closed forms are used where they exist (Parzen with a Gaussian truth,
//! basis kernels through the coefficients `c_i = <phi_i, s>`); everything else
//! falls back to quadrature. The quadrature paths are public so the closed
//! forms can be cross-checked.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::criterion::{symmetric_pair_sum, Sample};
use crate::density::KnownDensity;
use crate::error::{Error, Result};
use crate::kernels::{normal_pdf, BasisSpec, KernelModel};
use crate::quadrature::{gaussian_cutoff, Integrator, DEFAULT_TOL};

/// A kernel paired with the true density, with the basis coefficients of `s` precomputed.
#[derive(Debug, Clone)]
pub struct Oracle<'a> {
    kernel: &'a KernelModel,
    density: KnownDensity,
    // c_i = <phi_i, s> for basis kernels
    coeffs: Option<Vec<f64>>,
}

/// Widest panel used where every integrand is smooth on the unit scale.
const COARSE_PANEL: f64 = 1.0;

/// Integration interval, breakpoints and panel cap for functions of `x`.
/// With `fine` set, the cap applies inside that sub-interval only and
/// [`COARSE_PANEL`] outside it.
#[derive(Debug, Clone)]
struct Domain {
    lo: f64,
    hi: f64,
    breakpoints: Vec<f64>,
    max_panel: Option<f64>,
    fine: Option<(f64, f64)>,
}

impl Domain {
    fn integrate(&self, f: impl Fn(f64) -> f64) -> Result<f64> {
        let (Some((a, b)), Some(width)) = (self.fine, self.max_panel) else {
            let q = Integrator {
                max_panel: self.max_panel,
                ..Integrator::default()
            };
            return q.integrate(f, self.lo, self.hi, &self.breakpoints);
        };
        let total = self.hi - self.lo;
        let mut sum = 0.0;
        for (lo, hi, panel) in [
            (self.lo, a, COARSE_PANEL),
            (a, b, width),
            (b, self.hi, COARSE_PANEL),
        ] {
            if hi > lo {
                sum += Integrator::default()
                    .with_tol(DEFAULT_TOL * (hi - lo) / total)
                    .with_max_panel(panel)
                    .integrate(&f, lo, hi, &self.breakpoints)?;
            }
        }
        Ok(sum)
    }
}

/// `s_hat(x)`; for Parzen kernels only the observations within the kernel's
/// effective radius of `x` are summed.
struct Estimate<'a> {
    kernel: &'a KernelModel,
    sorted: Vec<f64>,
    radius: f64,
}

impl<'a> Estimate<'a> {
    fn new(kernel: &'a KernelModel, sample: &Sample) -> Self {
        let mut sorted = sample.values().to_vec();
        sorted.sort_by(f64::total_cmp);
        let radius = match kernel {
            KernelModel::Parzen { base, h } => base.effective_radius() * h,
            _ => f64::INFINITY,
        };
        Estimate {
            kernel,
            sorted,
            radius,
        }
    }

    fn at(&self, x: f64) -> f64 {
        let lo = self.sorted.partition_point(|&v| v < x - self.radius);
        let hi = self.sorted.partition_point(|&v| v <= x + self.radius);
        let sum: f64 = self.sorted[lo..hi]
            .iter()
            .map(|&xi| self.kernel.eval_unchecked(xi, x))
            .sum();
        sum / self.sorted.len() as f64
    }
}

impl<'a> Oracle<'a> {
    pub fn new(kernel: &'a KernelModel, density: KnownDensity) -> Result<Self> {
        kernel.validate()?;
        let coeffs = match kernel.basis_weights() {
            None => None,
            Some((basis, _)) => {
                if !density.on_unit_interval() {
                    return Err(Error::config(format!(
                        "density {} is not supported on [0, 1], the domain of {}",
                        density.name(),
                        kernel.label()
                    )));
                }
                Some(basis_coefficients(&basis, density)?)
            }
        };
        Ok(Oracle {
            kernel,
            density,
            coeffs,
        })
    }

    pub fn kernel(&self) -> &KernelModel {
        self.kernel
    }

    pub fn density(&self) -> KnownDensity {
        self.density
    }

    fn parzen_gaussian(&self) -> Option<(f64, f64)> {
        match (self.kernel, self.density) {
            (KernelModel::Parzen { base, h }, KnownDensity::StdGaussian) => {
                Some((base.shift(), *h))
            }
            _ => None,
        }
    }

    fn domain(&self, sample: Option<&Sample>) -> Domain {
        let (dlo, dhi) = self.density.integration_bounds();
        let mut breakpoints = Vec::new();
        if self.density.on_unit_interval() {
            breakpoints.extend([0.0, 1.0]);
        }
        match self.kernel {
            KernelModel::Parzen { base, h } => {
                let r = base.effective_radius() * h;
                let (mut lo, mut hi) = (dlo - r, dhi + r);
                let mut spread = (f64::INFINITY, f64::NEG_INFINITY);
                if let Some(s) = sample {
                    for &x in s.values() {
                        spread = (spread.0.min(x - r), spread.1.max(x + r));
                    }
                    lo = lo.min(spread.0);
                    hi = hi.max(spread.1);
                }
                let (max_panel, fine) = match (self.density.on_unit_interval(), sample) {
                    (true, _) => (Some(*h), None),
                    (false, Some(_)) => (Some(*h), Some(spread)),
                    (false, None) => (Some(COARSE_PANEL), None),
                };
                Domain {
                    lo,
                    hi,
                    breakpoints,
                    max_panel,
                    fine,
                }
            }
            _ => Domain {
                lo: 0.0,
                hi: 1.0,
                breakpoints: self.kernel.breakpoints(),
                max_panel: None,
                fine: None,
            },
        }
    }

    /// Weighted expansion `sum_i w_i^power c_i phi_i(x)`.
    fn expand(&self, x: f64, power: i32) -> f64 {
        let (basis, weights) = self.kernel.basis_weights().expect("basis kernel");
        let c = self.coeffs.as_ref().expect("basis coefficients");
        match basis {
            BasisSpec::RegularHistogram { dim } => {
                let b = BasisSpec::bin(dim, x);
                weights[b].powi(power) * c[b] * (dim as f64).sqrt()
            }
            BasisSpec::Fourier { .. } => (0..basis.size())
                .map(|i| weights[i].powi(power) * c[i] * basis.eval(i, x))
                .sum(),
        }
    }

    /// `s_k(x) = int k(y, x) s(y) dy`.
    pub fn smoothed_density(&self, x: f64) -> Result<f64> {
        self.kernel.check_point(x)?;
        if let Some((a, h)) = self.parzen_gaussian() {
            let v = 1.0 + h * h;
            return Ok(0.5 * (normal_pdf(x - a * h, v) + normal_pdf(x + a * h, v)));
        }
        if self.coeffs.is_some() {
            return Ok(self.expand(x, 1));
        }
        self.smoothed_density_by_quadrature(x)
    }

    pub fn smoothed_density_by_quadrature(&self, x: f64) -> Result<f64> {
        self.kernel.check_point(x)?;
        let radius = match self.kernel {
            KernelModel::Parzen { base, h } => base.effective_radius() * h,
            _ => f64::INFINITY,
        };
        self.density_integral(x, radius, |y| self.kernel.eval_unchecked(y, x))
    }

    /// `int g(y) s(y) dy` for a `g` negligible farther than `radius` from `x`.
    fn density_integral(&self, x: f64, radius: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
        let (dlo, dhi) = self.density.integration_bounds();
        let (lo, hi) = (dlo.max(x - radius), dhi.min(x + radius));
        let mut bp = self.kernel.breakpoints();
        bp.push(x);
        let mut q = Integrator::default();
        if let KernelModel::Parzen { h, .. } = self.kernel {
            q.max_panel = Some(*h);
        }
        q.integrate(|y| g(y) * self.density.pdf(y), lo, hi, &bp)
    }

    /// `F_A(x) = E[A(X, x)]`.
    pub fn composed_mean(&self, x: f64) -> Result<f64> {
        self.kernel.check_point(x)?;
        if let Some((a, h)) = self.parzen_gaussian() {
            let v = 1.0 + 2.0 * h * h;
            let m = 2.0 * a * h;
            return Ok(
                0.25 * (normal_pdf(x - m, v) + 2.0 * normal_pdf(x, v) + normal_pdf(x + m, v))
            );
        }
        if self.coeffs.is_some() {
            return Ok(self.expand(x, 2));
        }
        self.composed_mean_by_quadrature(x)
    }

    pub fn composed_mean_by_quadrature(&self, x: f64) -> Result<f64> {
        self.kernel.check_point(x)?;
        // K * K is a mixture of variance-2 Gaussians centred at 0 and +-2a.
        let radius = match self.kernel {
            KernelModel::Parzen { base, h } => {
                (2.0 * base.shift() + SQRT_2 * gaussian_cutoff()) * h
            }
            _ => f64::INFINITY,
        };
        self.density_integral(x, radius, |y| self.kernel.a_unchecked(x, y))
    }

    /// `||s_k||^2`, which also equals `E[A(X, Y)]` for independent `X, Y ~ s`.
    pub fn smoothed_norm_sq(&self) -> Result<f64> {
        if let Some((a, h)) = self.parzen_gaussian() {
            let v = 2.0 + 2.0 * h * h;
            return Ok(0.5 * (normal_pdf(0.0, v) + normal_pdf(2.0 * a * h, v)));
        }
        if let (Some(c), Some((_, w))) = (&self.coeffs, self.kernel.basis_weights()) {
            return Ok(c.iter().zip(w.iter()).map(|(c, w)| (w * c).powi(2)).sum());
        }
        self.domain(None)
            .integrate(|x| self.smoothed_density(x).unwrap_or(f64::NAN).powi(2))
    }

    /// `E[A(X, Y)]` by nested quadrature.
    pub fn expected_composed_by_quadrature(&self) -> Result<f64> {
        let (dlo, dhi) = self.density.integration_bounds();
        let mut q = Integrator::default();
        let mut bp = self.kernel.breakpoints();
        if let KernelModel::Parzen { h, .. } = self.kernel {
            q.max_panel = Some(4.0 * h);
        }
        if self.density.on_unit_interval() {
            bp.extend([0.0, 1.0]);
        }
        let inner = |x: f64| -> f64 {
            self.composed_mean_by_quadrature(x).unwrap_or(f64::NAN) * self.density.pdf(x)
        };
        let v = q.integrate(inner, dlo, dhi, &bp)?;
        if v.is_nan() {
            return Err(Error::Quadrature {
                lo: dlo,
                hi: dhi,
                err: f64::NAN,
            });
        }
        Ok(v)
    }

    /// `P s_k = E[k(X, Y)]`.
    pub fn smoothed_mean(&self) -> Result<f64> {
        if let Some((a, h)) = self.parzen_gaussian() {
            return Ok(normal_pdf(a * h, 2.0 + h * h));
        }
        if let (Some(c), Some((_, w))) = (&self.coeffs, self.kernel.basis_weights()) {
            return Ok(c.iter().zip(w.iter()).map(|(c, w)| w * c * c).sum());
        }
        let (dlo, dhi) = self.density.integration_bounds();
        Integrator::default()
            .with_max_panel(self.panel_hint())
            .integrate(
                |x| self.smoothed_density(x).unwrap_or(f64::NAN) * self.density.pdf(x),
                dlo,
                dhi,
                &[0.0, 1.0],
            )
    }

    fn panel_hint(&self) -> f64 {
        match self.kernel {
            KernelModel::Parzen { h, .. } => *h,
            _ => 1.0,
        }
    }

    /// `P g = int g s` over the density's support.
    fn expectation(&self, g: impl Fn(f64) -> f64) -> Result<f64> {
        let (dlo, dhi) = self.density.integration_bounds();
        let mut bp = self.kernel.breakpoints();
        bp.extend([0.0, 1.0]);
        Integrator::default()
            .with_max_panel(self.panel_hint())
            .integrate(|x| g(x) * self.density.pdf(x), dlo, dhi, &bp)
    }

    /// `P chi`.
    pub fn chi_mean(&self) -> Result<f64> {
        match self.kernel.constant_chi() {
            Some(c) => Ok(c),
            None => self.expectation(|x| self.kernel.eval_unchecked(x, x)),
        }
    }

    /// `P Theta`.
    pub fn variance_functional(&self) -> Result<f64> {
        match self.kernel.constant_theta() {
            Some(t) => Ok(t),
            None => self.expectation(|x| self.kernel.a_unchecked(x, x)),
        }
    }

    /// `||s - s_k||^2`.
    pub fn bias(&self) -> Result<f64> {
        if let KernelModel::Projection {
            basis: BasisSpec::RegularHistogram { dim },
        } = self.kernel
        {
            match self.density {
                KnownDensity::Uniform01 => return Ok(0.0),
                KnownDensity::Triangular2x => return Ok(1.0 / (3.0 * (*dim as f64).powi(2))),
                KnownDensity::StdGaussian => {}
            }
        }
        self.bias_by_quadrature()
    }

    pub fn bias_by_quadrature(&self) -> Result<f64> {
        self.domain(None).integrate(|x| {
            let sk = self.smoothed_density(x).unwrap_or(f64::NAN);
            (self.density.pdf(x) - sk).powi(2)
        })
    }

    /// `||s_hat - s||^2` by quadrature.
    pub fn true_risk(&self, sample: &Sample) -> Result<f64> {
        sample.check_for(self.kernel)?;
        let dom = self.domain(Some(sample));
        let est = Estimate::new(self.kernel, sample);
        dom.integrate(|x| (est.at(x) - self.density.pdf(x)).powi(2))
    }

    /// `||s_hat - s||^2 = ||s_hat||^2 - 2 P s_hat + ||s||^2`, with
    /// `||s_hat||^2 = (1/n^2) sum A(X_i, X_j)` and `P s_hat = (1/n) sum s_k(X_i)`.
    pub fn true_risk_expanded(&self, sample: &Sample, sum_composed: Option<f64>) -> Result<f64> {
        sample.check_for(self.kernel)?;
        let v = sample.values();
        let nf = v.len() as f64;
        let sum_a = match sum_composed {
            Some(s) => s,
            None => symmetric_pair_sum(v, |x, y| self.kernel.a_unchecked(x, y)),
        };
        let p_shat = v
            .iter()
            .map(|&x| self.smoothed_density(x))
            .sum::<Result<f64>>()?
            / nf;
        Ok(sum_a / (nf * nf) - 2.0 * p_shat + self.density.l2_norm_sq())
    }

    /// `||s_hat - s_k||^2` by quadrature.
    pub fn estimation_error(&self, sample: &Sample) -> Result<f64> {
        sample.check_for(self.kernel)?;
        let dom = self.domain(Some(sample));
        let est = Estimate::new(self.kernel, sample);
        dom.integrate(|x| (est.at(x) - self.smoothed_density(x).unwrap_or(f64::NAN)).powi(2))
    }

    /// `2 <s_hat - s_k, s_k - s>` by quadrature.
    pub fn cross_term(&self, sample: &Sample) -> Result<f64> {
        sample.check_for(self.kernel)?;
        let dom = self.domain(Some(sample));
        let est = Estimate::new(self.kernel, sample);
        let v = dom.integrate(|x| {
            let sk = self.smoothed_density(x).unwrap_or(f64::NAN);
            (est.at(x) - sk) * (sk - self.density.pdf(x))
        })?;
        Ok(2.0 * v)
    }

    /// `2 (P_n - P)(s_hat) = 2 [(1/n^2) sum k(X_i, X_j) - (1/n) sum s_k(X_i)]`.
    pub fn ideal_penalty(&self, sample: &Sample) -> Result<f64> {
        sample.check_for(self.kernel)?;
        let v = sample.values();
        let nf = v.len() as f64;
        let pn = symmetric_pair_sum(v, |x, y| self.kernel.eval_unchecked(x, y)) / (nf * nf);
        let p = v
            .iter()
            .map(|&x| self.smoothed_density(x))
            .sum::<Result<f64>>()?
            / nf;
        Ok(2.0 * (pn - p))
    }

    /// The four-term expansion of the ideal penalty:
    /// `2 [(P chi - P s_k)/n + (P_n - P) chi / n + U_k / n^2 + (1 - 2/n)(P_n - P) s_k]`
    /// with `U_k = sum_{i != j} (k(X_i, X_j) - s_k(X_i) - s_k(X_j) + E k(X, Y))`.
    pub fn ideal_penalty_expansion(&self, sample: &Sample) -> Result<IdealPenaltyTerms> {
        sample.check_for(self.kernel)?;
        let v = sample.values();
        let n = v.len();
        let nf = n as f64;
        let p_chi = self.chi_mean()?;
        let p_sk = self.smoothed_mean()?;
        let sk: Vec<f64> = v
            .iter()
            .map(|&x| self.smoothed_density(x))
            .collect::<Result<_>>()?;
        let pn_chi = v
            .iter()
            .map(|&x| self.kernel.eval_unchecked(x, x))
            .sum::<f64>()
            / nf;
        let pn_sk = sk.iter().sum::<f64>() / nf;
        let mut u = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                u += self.kernel.eval_unchecked(v[i], v[j]) - sk[i] - sk[j] + p_sk;
            }
        }
        u *= 2.0;
        let bias_term = (p_chi - p_sk) / nf;
        let chi_fluct = (pn_chi - p_chi) / nf;
        let ustat = u / (nf * nf);
        let sk_fluct = (1.0 - 2.0 / nf) * (pn_sk - p_sk);
        Ok(IdealPenaltyTerms {
            expectation_term: bias_term,
            chi_fluctuation: chi_fluct,
            ustat_term: ustat,
            smoothed_fluctuation: sk_fluct,
            total: 2.0 * (bias_term + chi_fluct + ustat + sk_fluct),
        })
    }

    /// Both sides of `||s_k - s_hat||^2 = P_n zeta / n + U_A / n^2`.
    pub fn ustat_decomposition(&self, sample: &Sample) -> Result<UstatDecomposition> {
        let v = sample.values();
        let n = v.len();
        if n < 2 {
            return Err(Error::data(
                "the U-statistic decomposition needs at least two observations",
            ));
        }
        let lhs = self.estimation_error(sample)?;
        let nf = n as f64;
        let mean_a = self.smoothed_norm_sq()?;
        let f: Vec<f64> = v
            .iter()
            .map(|&x| self.composed_mean(x))
            .collect::<Result<_>>()?;
        let pn_zeta = v
            .iter()
            .zip(&f)
            .map(|(&x, fx)| self.kernel.a_unchecked(x, x) - 2.0 * fx + mean_a)
            .sum::<f64>()
            / nf;
        let mut u = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                u += self.kernel.a_unchecked(v[i], v[j]) - f[i] - f[j] + mean_a;
            }
        }
        u *= 2.0;
        let pn_zeta_over_n = pn_zeta / nf;
        let u_over_n2 = u / (nf * nf);
        Ok(UstatDecomposition {
            lhs,
            pn_zeta_over_n,
            u_over_n2,
            residual: lhs - (pn_zeta_over_n + u_over_n2),
        })
    }

    /// Bernstein deviation scale of `(P_n - P) s_k` at level `u`, from `P s_k^2`
    /// and `sup s_k` (taken over the sample and a 1001-point grid of the domain).
    pub fn smoothed_deviation_scale(&self, sample: &Sample, u: f64) -> Result<f64> {
        let p_sq = self.expectation(|x| self.smoothed_density(x).unwrap_or(f64::NAN).powi(2))?;
        let dom = self.domain(Some(sample));
        let grid = (0..=1000).map(|i| dom.lo + (dom.hi - dom.lo) * i as f64 / 1000.0);
        let mut sup = 0f64;
        for x in grid.chain(sample.values().iter().copied()) {
            if self.kernel.check_point(x).is_ok() {
                sup = sup.max(self.smoothed_density(x)?.abs());
            }
        }
        bernstein_bound(p_sq, sup, sample.len(), u)
    }

    pub fn report(&self, sample: &Sample) -> Result<OracleReport> {
        let n = sample.len() as f64;
        let ustat = if sample.len() >= 2 {
            Some(self.ustat_decomposition(sample)?)
        } else {
            None
        };
        Ok(OracleReport {
            true_risk: self.true_risk(sample)?,
            bias: self.bias()?,
            variance_term: self.variance_functional()? / n,
            estimation_error: self.estimation_error(sample)?,
            ideal_penalty: self.ideal_penalty(sample)?,
            ustat_residual: ustat.map(|u| u.residual),
            cross_term: self.cross_term(sample)?,
        })
    }
}

fn basis_coefficients(basis: &BasisSpec, density: KnownDensity) -> Result<Vec<f64>> {
    match *basis {
        BasisSpec::RegularHistogram { dim } => Ok((0..dim)
            .map(|i| {
                let (a, b) = BasisSpec::bin_edges(dim, i);
                (dim as f64).sqrt() * density.unit_mass(a, b).unwrap_or(0.0)
            })
            .collect()),
        BasisSpec::Fourier { p } => (0..p)
            .map(|i| {
                Integrator::default().integrate(
                    |x| basis.eval(i, x) * density.pdf(x),
                    0.0,
                    1.0,
                    &[],
                )
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdealPenaltyTerms {
    pub expectation_term: f64,
    pub chi_fluctuation: f64,
    pub ustat_term: f64,
    pub smoothed_fluctuation: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UstatDecomposition {
    pub lhs: f64,
    pub pn_zeta_over_n: f64,
    pub u_over_n2: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleReport {
    pub true_risk: f64,
    pub bias: f64,
    pub variance_term: f64,
    /// `||s_hat - s_k||^2`.
    pub estimation_error: f64,
    pub ideal_penalty: f64,
    /// `None` when `n < 2`.
    pub ustat_residual: Option<f64>,
    pub cross_term: f64,
}

pub fn smoothed_density(k: &KernelModel, density: KnownDensity, x: f64) -> Result<f64> {
    Oracle::new(k, density)?.smoothed_density(x)
}

pub fn bias(k: &KernelModel, density: KnownDensity) -> Result<f64> {
    Oracle::new(k, density)?.bias()
}

/// `P Theta`; divide by `n` for the variance term.
pub fn variance_functional(k: &KernelModel, density: KnownDensity) -> Result<f64> {
    Oracle::new(k, density)?.variance_functional()
}

pub fn true_risk(k: &KernelModel, sample: &Sample, density: KnownDensity) -> Result<f64> {
    Oracle::new(k, density)?.true_risk(sample)
}

pub fn ideal_penalty(k: &KernelModel, sample: &Sample, density: KnownDensity) -> Result<f64> {
    Oracle::new(k, density)?.ideal_penalty(sample)
}

pub fn ustat_decomposition(
    k: &KernelModel,
    sample: &Sample,
    density: KnownDensity,
) -> Result<UstatDecomposition> {
    Oracle::new(k, density)?.ustat_decomposition(sample)
}

/// Bernstein deviation bound `sqrt(2 P(f^2) u / n) + ||f||_inf u / (3n)`.
pub fn bernstein_bound(second_moment: f64, sup_norm: f64, n: usize, u: f64) -> Result<f64> {
    if !(second_moment >= 0.0 && sup_norm >= 0.0 && u > 0.0 && n >= 1)
        || !(second_moment.is_finite() && sup_norm.is_finite() && u.is_finite())
    {
        return Err(Error::config(format!(
            "invalid Bernstein arguments: P(f^2)={second_moment}, sup={sup_norm}, n={n}, u={u}"
        )));
    }
    let nf = n as f64;
    Ok((2.0 * second_moment * u / nf).sqrt() + sup_norm * u / (3.0 * nf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::BaseKernel;

    fn parzen(a: f64, h: f64) -> KernelModel {
        KernelModel::parzen(BaseKernel::two_bump(a), h).unwrap()
    }

    #[test]
    fn smoothed_density_examples() {
        let v = smoothed_density(&parzen(0.0, 1.0), KnownDensity::StdGaussian, 0.0).unwrap();
        assert!((v - 0.282_094_8).abs() < 1e-7);
        let h1 = KernelModel::histogram(1).unwrap();
        for d in [KnownDensity::Uniform01, KnownDensity::Triangular2x] {
            assert!((smoothed_density(&h1, d, 0.37).unwrap() - 1.0).abs() < 1e-15);
        }
        let h2 = KernelModel::histogram(2).unwrap();
        assert!(
            (smoothed_density(&h2, KnownDensity::Triangular2x, 0.25).unwrap() - 0.5).abs() < 1e-15
        );
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for (a, h) in [(0.0, 1.0), (1.5, 0.3), (3.0, 0.1)] {
            let k = parzen(a, h);
            let o = Oracle::new(&k, KnownDensity::StdGaussian).unwrap();
            for x in [-2.0, -0.3, 0.0, 0.8, 3.1] {
                let d = (o.smoothed_density(x).unwrap()
                    - o.smoothed_density_by_quadrature(x).unwrap())
                .abs();
                assert!(d < 1e-8, "s_k a={a} h={h} x={x}: {d}");
                let d =
                    (o.composed_mean(x).unwrap() - o.composed_mean_by_quadrature(x).unwrap()).abs();
                assert!(d < 1e-8, "F_A a={a} h={h} x={x}: {d}");
            }
            let d = (o.smoothed_norm_sq().unwrap() - o.expected_composed_by_quadrature().unwrap())
                .abs();
            assert!(d < 1e-8, "E A a={a} h={h}: {d}");
            let d = (o.bias().unwrap() - o.bias_by_quadrature().unwrap()).abs();
            assert!(d < 1e-12);
        }
        let k = KernelModel::fourier_paired(1.0, &[0.7, 0.2]).unwrap();
        let o = Oracle::new(&k, KnownDensity::Triangular2x).unwrap();
        for x in [0.0, 0.21, 0.5, 0.99] {
            let d = (o.smoothed_density(x).unwrap() - o.smoothed_density_by_quadrature(x).unwrap())
                .abs();
            assert!(d < 1e-9);
            let d = (o.composed_mean(x).unwrap() - o.composed_mean_by_quadrature(x).unwrap()).abs();
            assert!(d < 1e-9);
        }
        let d =
            (o.smoothed_norm_sq().unwrap() - o.expected_composed_by_quadrature().unwrap()).abs();
        assert!(d < 1e-9);
    }

    #[test]
    fn histogram_bias_shortcut_matches_quadrature() {
        let k = KernelModel::histogram(4).unwrap();
        let o = Oracle::new(&k, KnownDensity::Triangular2x).unwrap();
        assert!((o.bias().unwrap() - 1.0 / 48.0).abs() < 1e-15);
        assert!((o.bias_by_quadrature().unwrap() - 1.0 / 48.0).abs() < 1e-10);
        let k1 = KernelModel::histogram(1).unwrap();
        assert_eq!(bias(&k1, KnownDensity::Uniform01).unwrap(), 0.0);
    }

    #[test]
    fn parzen_bias_shrinks_with_bandwidth() {
        let b_small = bias(&parzen(0.0, 0.1), KnownDensity::StdGaussian).unwrap();
        let b_large = bias(&parzen(0.0, 1.0), KnownDensity::StdGaussian).unwrap();
        assert!(b_small <= b_large);
    }

    #[test]
    fn variance_functional_examples() {
        assert_eq!(
            variance_functional(&KernelModel::histogram(7).unwrap(), KnownDensity::Uniform01)
                .unwrap(),
            7.0
        );
        let v = variance_functional(&parzen(0.0, 0.5), KnownDensity::StdGaussian).unwrap();
        assert!((v - 0.564_189_6).abs() < 1e-7);
        let k = KernelModel::fourier_paired(1.0, &[1.0]).unwrap();
        assert!((variance_functional(&k, KnownDensity::Uniform01).unwrap() - 3.0).abs() < 1e-15);
        // Non-paired weights fall back to quadrature of Theta against s.
        let k = KernelModel::weighted(BasisSpec::Fourier { p: 3 }, vec![1.0, 1.0, 0.0]).unwrap();
        let pt = variance_functional(&k, KnownDensity::Uniform01).unwrap();
        assert!((pt - 2.0).abs() < 1e-10);
    }

    #[test]
    fn true_risk_examples() {
        let s = Sample::new(vec![0.1, 0.2]).unwrap();
        let k = KernelModel::histogram(2).unwrap();
        let r = true_risk(&k, &s, KnownDensity::Triangular2x).unwrap();
        assert!((r - 7.0 / 3.0).abs() < 1e-10);
        let o = Oracle::new(&k, KnownDensity::Triangular2x).unwrap();
        assert!((o.true_risk_expanded(&s, None).unwrap() - 7.0 / 3.0).abs() < 1e-12);
        let k1 = KernelModel::histogram(1).unwrap();
        assert!(true_risk(&k1, &s, KnownDensity::Uniform01).unwrap().abs() < 1e-14);
    }

    #[test]
    fn ideal_penalty_examples() {
        let s = Sample::new(vec![0.0]).unwrap();
        let v = ideal_penalty(&parzen(0.0, 1.0), &s, KnownDensity::StdGaussian).unwrap();
        assert!((v - 0.233_695_0).abs() < 1e-7);
        let s = Sample::new(vec![0.3, 0.9, 0.4]).unwrap();
        let k1 = KernelModel::histogram(1).unwrap();
        assert!(
            ideal_penalty(&k1, &s, KnownDensity::Triangular2x)
                .unwrap()
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn ustat_trivial_histogram() {
        let s = Sample::new(vec![0.3, 0.9, 0.4]).unwrap();
        let k1 = KernelModel::histogram(1).unwrap();
        let u = ustat_decomposition(&k1, &s, KnownDensity::Uniform01).unwrap();
        assert!(u.lhs.abs() < 1e-15 && u.pn_zeta_over_n.abs() < 1e-15 && u.u_over_n2.abs() < 1e-15);
        let one = Sample::new(vec![0.3]).unwrap();
        assert!(matches!(
            ustat_decomposition(&k1, &one, KnownDensity::Uniform01),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn basis_kernel_with_gaussian_truth_is_rejected() {
        let k = KernelModel::histogram(3).unwrap();
        assert!(matches!(
            Oracle::new(&k, KnownDensity::StdGaussian),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn bernstein_examples() {
        assert!((bernstein_bound(1.0, 1.0, 100, 1.0).unwrap() - 0.144_754_7).abs() < 1e-7);
        assert_eq!(bernstein_bound(0.0, 0.0, 7, 3.0).unwrap(), 0.0);
        assert!((bernstein_bound(4.0, 3.0, 100, 2.0).unwrap() - 0.42).abs() < 1e-15);
        assert!(bernstein_bound(-1.0, 0.0, 1, 1.0).is_err());
        assert!(bernstein_bound(1.0, 0.0, 0, 1.0).is_err());
        assert!(bernstein_bound(1.0, 0.0, 1, 0.0).is_err());
    }
}
