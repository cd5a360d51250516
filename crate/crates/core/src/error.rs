use thiserror::Error;

/// Errors raised by kernel evaluation, selection, diagnostics and experiments.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point was outside the domain of a basis kernel.
    #[error("point {x} is outside the kernel domain [0, 1]")]
    Domain { x: f64 },

    /// Invalid parameters in a kernel, family, rule or experiment config.
    #[error("configuration error: {0}")]
    Config(String),

    /// Problems with the observations themselves.
    #[error("data error: {0}")]
    Data(String),

    /// The penalty rule needs deterministic `P chi` / `P Theta` and the kernel does not have them.
    #[error(
        "penalty rule {rule} is unavailable for kernel {kernel}: chi or Theta is not constant"
    )]
    RuleUnavailable { rule: String, kernel: String },

    #[error("density {0} is unbounded; no admissible Upsilon exists")]
    UnsupportedDensity(String),

    #[error("quadrature did not converge on [{lo}, {hi}] (estimated error {err:e})")]
    Quadrature { lo: f64, hi: f64, err: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
}
