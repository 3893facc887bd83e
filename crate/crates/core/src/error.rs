use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("bond price must be positive, got {0}")]
    NonPositivePrice(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("trade index out of range: date slot {slot}, maturity {maturity}")]
    IndexOutOfRange { slot: usize, maturity: usize },
    #[error("cost inverse did not converge for target cash {target}")]
    NoConvergence { target: f64 },
    #[error("non-finite gradient at step {step}")]
    NonFiniteGradient { step: u64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }
}
