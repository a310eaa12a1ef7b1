use thiserror::Error;

/// Errors raised by model construction and the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("index {n} outside sector of size {dim}")]
    OutOfSector { n: usize, dim: usize },

    #[error("sector {mu} does not match model multiplicities (k0={k0}, k1={k1})")]
    SectorMismatch { mu: String, k0: usize, k1: usize },

    #[error("sector level N={n} exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("no coefficient table for sector level N={0}")]
    MissingTable(usize),

    #[error("malformed coefficient table for N={n}: {reason}")]
    MalformedTable { n: usize, reason: String },

    #[error("off-diagonal coefficient b_{0} vanishes; the sector decouples")]
    VanishingCoupling(usize),

    #[error("eigenvalues {i} and {j} collide ({ei} vs {ej}); spectrum is not simple")]
    DegenerateSpectrum { i: usize, j: usize, ei: f64, ej: f64 },

    #[error("tridiagonal eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("series does not terminate: no numerator parameter is a nonpositive integer (or q^-m)")]
    NonTerminating,

    #[error("denominator Pochhammer vanishes at series index {0}")]
    VanishingDenominator(usize),

    #[error("quantity under square root is negative ({value}) in {context}")]
    NegativeRadicand { context: &'static str, value: f64 },

    #[error("index l={l} outside 0..={n}")]
    IndexOutOfRange { l: usize, n: usize },

    #[error("observable is not Hermitian: block ({mu}, {nu}) has residual {residual:e}")]
    NotHermitian { mu: String, nu: String, residual: f64 },

    #[error("state block for {mu} has length {len}, expected {dim}")]
    StateShape { mu: String, len: usize, dim: usize },

    #[error("state norm is {0}, expected 1")]
    NotNormalized(f64),
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical pipeline (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateSpectrum { .. }
                | Error::NoConvergence(_)
                | Error::VanishingCoupling(_)
                | Error::NegativeRadicand { .. }
                | Error::VanishingDenominator(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
