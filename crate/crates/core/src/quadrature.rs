//! Composite Gauss-Legendre quadrature on adaptively bisected panels.
//!
//! Every panel is integrated with a fixed 64-point Gauss-Legendre rule. A panel
//! is accepted when the rule applied to the whole panel and to its two halves
//! agree within the panel's share of the absolute tolerance; otherwise both
//! halves are refined independently. Callers pass breakpoints at known
//! discontinuities (histogram bin edges) and may cap the initial panel width so
//! that narrow bumps are never stepped over by the first 64 nodes.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Number of Gauss-Legendre nodes per panel.
pub const NODES: usize = 64;

/// Default absolute tolerance for every integral in the crate.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Half-width, in standard deviations, beyond which a Gaussian falls below
/// `1e-16` of its peak: `sqrt(2 ln 1e16)`.
pub fn gaussian_cutoff() -> f64 {
    (2.0 * 1e16f64.ln()).sqrt()
}

struct Rule {
    nodes: [f64; NODES],
    weights: [f64; NODES],
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let (nodes, weights) = legendre_rule(NODES);
        let mut r = Rule {
            nodes: [0.0; NODES],
            weights: [0.0; NODES],
        };
        r.nodes.copy_from_slice(&nodes);
        r.weights.copy_from_slice(&weights);
        r
    })
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// found by Newton iteration on the three-term Legendre recurrence.
pub fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Applies the fixed 64-point rule on `[a, b]`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let r = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (x, w) in r.nodes.iter().zip(r.weights.iter()) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Adaptive integrator configuration.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub tol: f64,
    pub max_depth: u32,
    /// Upper bound on the width of the initial panels, if any.
    pub max_panel: Option<f64>,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator {
            tol: DEFAULT_TOL,
            max_depth: 40,
            max_panel: None,
        }
    }
}

impl Integrator {
    pub fn with_max_panel(mut self, width: f64) -> Self {
        self.max_panel = Some(width);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Integrates `f` over `[lo, hi]`, splitting at every breakpoint strictly inside.
    pub fn integrate<F: Fn(f64) -> f64>(
        &self,
        f: F,
        lo: f64,
        hi: f64,
        breakpoints: &[f64],
    ) -> Result<f64> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::config("integration bounds must be finite"));
        }
        if hi <= lo {
            return Ok(0.0);
        }
        let panels = self.initial_panels(lo, hi, breakpoints);
        let total = hi - lo;
        let mut sum = 0.0;
        for (a, b) in panels {
            let share = self.tol * (b - a) / total;
            let whole = gauss_legendre(&f, a, b);
            sum += self.refine(&f, a, b, whole, share, 0)?;
        }
        Ok(sum)
    }

    fn initial_panels(&self, lo: f64, hi: f64, breakpoints: &[f64]) -> Vec<(f64, f64)> {
        let mut cuts: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&b| b > lo && b < hi)
            .collect();
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut panels = Vec::with_capacity(cuts.len());
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let pieces = match self.max_panel {
                Some(m) if m > 0.0 => ((b - a) / m).ceil().max(1.0) as usize,
                _ => 1,
            };
            let step = (b - a) / pieces as f64;
            for i in 0..pieces {
                let pa = a + step * i as f64;
                let pb = if i + 1 == pieces {
                    b
                } else {
                    a + step * (i + 1) as f64
                };
                panels.push((pa, pb));
            }
        }
        panels
    }

    fn refine<F: Fn(f64) -> f64>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let left = gauss_legendre(f, a, m);
        let right = gauss_legendre(f, m, b);
        let halves = left + right;
        let err = (halves - whole).abs();
        if !err.is_finite() {
            return Err(Error::Quadrature { lo: a, hi: b, err });
        }
        let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if err <= tol.max(floor) {
            return Ok(halves);
        }
        if depth >= self.max_depth || m <= a || m >= b {
            return Err(Error::Quadrature { lo: a, hi: b, err });
        }
        Ok(self.refine(f, a, m, left, 0.5 * tol, depth + 1)?
            + self.refine(f, m, b, right, 0.5 * tol, depth + 1)?)
    }
}

/// Integrates with the default integrator.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, breakpoints: &[f64]) -> Result<f64> {
    Integrator::default().integrate(f, lo, hi, breakpoints)
}
