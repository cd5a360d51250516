use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

/// Orthonormal systems on `[0, 1]` with Lebesgue measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisSpec {
    /// `phi_i = sqrt(D) 1_[(i-1)/D, i/D)`, `i = 1..D`; the point `1` belongs to the last bin.
    RegularHistogram { dim: usize },
    /// `phi_0 = 1`, `phi_{2j-1} = sqrt(2) cos(2 pi j x)`, `phi_{2j} = sqrt(2) sin(2 pi j x)`
    /// for `j = 1..(p-1)/2`; `p` is odd and counts the functions.
    Fourier { p: usize },
}

impl BasisSpec {
    pub fn size(&self) -> usize {
        match *self {
            BasisSpec::RegularHistogram { dim } => dim,
            BasisSpec::Fourier { p } => p,
        }
    }

    pub fn is_valid(&self) -> bool {
        match *self {
            BasisSpec::RegularHistogram { dim } => dim >= 1,
            BasisSpec::Fourier { p } => p % 2 == 1,
        }
    }

    /// Index of the histogram bin containing `x`.
    #[inline]
    pub fn bin(dim: usize, x: f64) -> usize {
        ((x * dim as f64) as usize).min(dim - 1)
    }

    /// `phi_i(x)`.
    pub fn eval(&self, i: usize, x: f64) -> f64 {
        match *self {
            BasisSpec::RegularHistogram { dim } => {
                if Self::bin(dim, x) == i {
                    (dim as f64).sqrt()
                } else {
                    0.0
                }
            }
            BasisSpec::Fourier { .. } => {
                if i == 0 {
                    return 1.0;
                }
                let j = i.div_ceil(2) as f64;
                let arg = 2.0 * PI * j * x;
                if i % 2 == 1 {
                    SQRT_2 * arg.cos()
                } else {
                    SQRT_2 * arg.sin()
                }
            }
        }
    }

    /// `sup_x sum_i phi_i(x)^2`: `D` for histograms, `1 + 2 (p - 1) / 2 = p` for Fourier.
    pub fn sup_sum_sq(&self) -> f64 {
        self.size() as f64
    }

    /// Interior discontinuities of the basis functions.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            BasisSpec::RegularHistogram { dim } => {
                (1..dim).map(|i| i as f64 / dim as f64).collect()
            }
            BasisSpec::Fourier { .. } => Vec::new(),
        }
    }

    /// Bin edges `[(i-1)/D, i/D]` for histogram bin `i` (zero-based).
    pub fn bin_edges(dim: usize, i: usize) -> (f64, f64) {
        (i as f64 / dim as f64, (i + 1) as f64 / dim as f64)
    }

    pub fn label(&self) -> String {
        match *self {
            BasisSpec::RegularHistogram { dim } => format!("histogram(D={dim})"),
            BasisSpec::Fourier { p } => format!("fourier(p={p})"),
        }
    }
}
