use thiserror::Error;

/// Errors raised by the numerical kernels and the CLI layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what}: series not converged after {terms} terms (tail bound {bound:e})")]
    Truncation {
        what: &'static str,
        terms: usize,
        bound: f64,
    },

    #[error("quadrature did not converge: achieved error {achieved:e} > requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("regime precondition violated: {0}")]
    Regime(String),

    #[error("ambiguous orbit type: R = Rc (orbit through the axis)")]
    AmbiguousOrbit,

    #[error("degenerate state: {0}")]
    Degenerate(String),

    #[error("invariant failure [{key}]: {detail}")]
    Invariant { key: &'static str, detail: String },

    #[error("incompatible species/mode: {0}")]
    Mode(String),

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short tag naming the failing check, printed by the CLI.
    pub fn key(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Truncation { what, .. } => what,
            Error::Quadrature { .. } => "quadrature",
            Error::Regime(_) => "regime",
            Error::AmbiguousOrbit => "ambiguous_orbit",
            Error::Degenerate(_) => "degenerate",
            Error::Invariant { key, .. } => key,
            Error::Mode(_) => "mode",
            Error::Sampling(_) => "sampling",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }

    /// Process exit code used by the CLI: 2 for configuration problems, 3 for numerics.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
