use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Shapes that do not fit together: an element with the wrong number of
    /// residues, a factor list that is not a group, mixed groups.
    #[error("structural error: {0}")]
    Structural(String),

    /// Input that is well-formed but violates a documented invariant.
    /// `field` names the offending input (`R`, `S`, `T2`, ...).
    #[error("validation error in {field}: {message}")]
    Validation { field: String, message: String },

    /// An operation was called outside its domain.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The spectrum has an eigenvalue that is not an integer, so the
    /// gcd-based time quantization does not apply.
    #[error("non-integral spectrum: eigenvalue {eigenvalue} at z = {z:?}")]
    NonIntegral { z: Vec<u32>, eigenvalue: f64 },

    #[error("size cap exceeded: {what} is {actual}, cap is {cap}")]
    SizeCap {
        what: &'static str,
        actual: usize,
        cap: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
