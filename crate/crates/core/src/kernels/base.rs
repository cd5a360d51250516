use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::quadrature::gaussian_cutoff;

/// Base function `K` of a Parzen kernel.
///
/// `TwoBumpGaussian { a }` is the symmetric mixture
/// `K_a(u) = (phi(u - a) + phi(u + a)) / 2` of two unit-variance Gaussians;
/// `Gaussian` is the `a = 0` member and is treated identically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseKernel {
    Gaussian,
    TwoBumpGaussian { a: f64 },
}

#[inline]
pub(crate) fn normal_pdf(x: f64, var: f64) -> f64 {
    (-0.5 * x * x / var).exp() / (2.0 * PI * var).sqrt()
}

impl BaseKernel {
    pub fn two_bump(a: f64) -> Self {
        BaseKernel::TwoBumpGaussian { a }
    }

    /// Half-distance between the two bumps (`0` for the Gaussian alias).
    pub fn shift(&self) -> f64 {
        match *self {
            BaseKernel::Gaussian => 0.0,
            BaseKernel::TwoBumpGaussian { a } => a,
        }
    }

    pub fn is_valid(&self) -> bool {
        let a = self.shift();
        a.is_finite() && a >= 0.0
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        let a = self.shift();
        if a == 0.0 {
            return normal_pdf(u, 1.0);
        }
        0.5 * (normal_pdf(u - a, 1.0) + normal_pdf(u + a, 1.0))
    }

    /// `K(0) = exp(-a^2 / 2) / sqrt(2 pi)`.
    pub fn at_zero(&self) -> f64 {
        let a = self.shift();
        (-0.5 * a * a).exp() / (2.0 * PI).sqrt()
    }

    /// `||K||_2^2 = (1 + exp(-a^2)) / (4 sqrt(pi))`.
    pub fn l2_norm_sq(&self) -> f64 {
        let a = self.shift();
        (1.0 + (-a * a).exp()) / (4.0 * PI.sqrt())
    }

    /// `K >= 0` integrates to one, so the L1 norm is exactly one.
    pub fn l1_norm(&self) -> f64 {
        1.0
    }

    /// `||K||_inf`, located numerically: a grid scan on `[0, a + 1]` followed
    /// by golden-section refinement around the best grid point.
    pub fn sup_norm(&self) -> f64 {
        let a = self.shift();
        // Two unit Gaussians closer than 2 standard deviations give a unimodal mixture.
        if a <= 1.0 {
            return self.eval(0.0);
        }
        let hi = a + 1.0;
        let steps = 2000;
        let dx = hi / steps as f64;
        let (mut best_i, mut best) = (0usize, self.eval(0.0));
        for i in 1..=steps {
            let v = self.eval(i as f64 * dx);
            if v > best {
                best = v;
                best_i = i;
            }
        }
        let mut lo = (best_i as f64 - 1.0).max(0.0) * dx;
        let mut up = ((best_i + 1) as f64 * dx).min(hi);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let x1 = up - g * (up - lo);
            let x2 = lo + g * (up - lo);
            if self.eval(x1) < self.eval(x2) {
                lo = x1;
            } else {
                up = x2;
            }
        }
        best.max(self.eval(0.5 * (lo + up)))
    }

    /// Self-convolution `(K * K)(u)`, the mixture
    /// `[N(-2a, 2) + 2 N(0, 2) + N(2a, 2)] / 4` evaluated at `u`.
    #[inline]
    pub fn self_convolution(&self, u: f64) -> f64 {
        let a = self.shift();
        if a == 0.0 {
            return normal_pdf(u, 2.0);
        }
        0.25 * (normal_pdf(u - 2.0 * a, 2.0)
            + 2.0 * normal_pdf(u, 2.0)
            + normal_pdf(u + 2.0 * a, 2.0))
    }

    /// Radius outside which `K` is below `1e-16` of its peak.
    pub fn effective_radius(&self) -> f64 {
        self.shift() + gaussian_cutoff()
    }
}
