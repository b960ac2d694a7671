use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite component in quaternion ({0}, {1}, {2}, {3})")]
    NonFinite(f64, f64, f64, f64),

    #[error("cannot parse quaternion from {input:?}: expected a+bi+cj+dk")]
    Parse { input: String },

    #[error("involution quadruple is inconsistent: imaginary residue {residue:e} exceeds {tolerance:e}")]
    InconsistentQuadruple { residue: f64, tolerance: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("expected a {expected} gradient, got a {found} gradient")]
    SideMismatch {
        expected: crate::Side,
        found: crate::Side,
    },

    #[error("function is not real-valued: symmetry residue {residue:e} exceeds {tolerance:e}")]
    NotRealValued { residue: f64, tolerance: f64 },

    #[error("|q - q0| = {radius} lies outside the annulus [{inner}, {outer}]")]
    OutsideAnnulus { radius: f64, inner: f64, outer: f64 },

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
