//! Known true densities for oracle-mode diagnostics and simulation.

use std::f64::consts::PI;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::quadrature::gaussian_cutoff;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KnownDensity {
    /// Standard normal on the real line.
    StdGaussian,
    /// Uniform on `[0, 1]`.
    Uniform01,
    /// `s(x) = 2x` on `[0, 1]`.
    Triangular2x,
}

impl KnownDensity {
    pub fn name(&self) -> &'static str {
        match self {
            KnownDensity::StdGaussian => "std-gaussian",
            KnownDensity::Uniform01 => "uniform",
            KnownDensity::Triangular2x => "triangular",
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            KnownDensity::StdGaussian => (-0.5 * x * x).exp() / (2.0 * PI).sqrt(),
            KnownDensity::Uniform01 => {
                if (0.0..=1.0).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
            KnownDensity::Triangular2x => {
                if (0.0..=1.0).contains(&x) {
                    2.0 * x
                } else {
                    0.0
                }
            }
        }
    }

    /// True when the density is supported on `[0, 1]`.
    pub fn on_unit_interval(&self) -> bool {
        !matches!(self, KnownDensity::StdGaussian)
    }

    /// `||s||_inf`.
    pub fn sup_norm(&self) -> f64 {
        match self {
            KnownDensity::StdGaussian => 1.0 / (2.0 * PI).sqrt(),
            KnownDensity::Uniform01 => 1.0,
            KnownDensity::Triangular2x => 2.0,
        }
    }

    /// `||s||_2^2`.
    pub fn l2_norm_sq(&self) -> f64 {
        match self {
            KnownDensity::StdGaussian => 1.0 / (2.0 * PI.sqrt()),
            KnownDensity::Uniform01 => 1.0,
            KnownDensity::Triangular2x => 4.0 / 3.0,
        }
    }

    /// Finite interval carrying all the mass that matters at `1e-16` relative precision.
    pub fn integration_bounds(&self) -> (f64, f64) {
        match self {
            KnownDensity::StdGaussian => {
                let c = gaussian_cutoff();
                (-c, c)
            }
            _ => (0.0, 1.0),
        }
    }

    /// `P([a, b])` for the unit-interval densities.
    pub fn unit_mass(&self, a: f64, b: f64) -> Option<f64> {
        let (a, b) = (a.clamp(0.0, 1.0), b.clamp(0.0, 1.0));
        match self {
            KnownDensity::StdGaussian => None,
            KnownDensity::Uniform01 => Some(b - a),
            KnownDensity::Triangular2x => Some(b * b - a * a),
        }
    }

    /// Inverse CDF on `(0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            KnownDensity::StdGaussian => normal_quantile(u),
            KnownDensity::Uniform01 => u,
            KnownDensity::Triangular2x => u.sqrt(),
        }
    }

    /// Draws `n` observations by inversion from a ChaCha8 stream seeded with `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.quantile(open_unit(&mut rng))).collect()
    }
}

/// Uniform draw in the open interval `(0, 1)`: the top 53 bits, offset by half an ulp.
fn open_unit<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal quantile by Acklam's rational approximation
/// (relative error below `1.15e-9` on `(0, 1)`).
///
/// Central region `0.02425 <= p <= 0.97575` uses `q = p - 0.5`, `r = q^2` and
/// `q (a1 r^5 + ... + a6) / (b1 r^5 + ... + b5 r + 1)`; the tails use
/// `q = sqrt(-2 ln p)` (or `ln(1 - p)`) and `(c1 q^5 + ... + c6) / (d1 q^4 + ... + d4 q + 1)`.
pub fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    }
}
