use thiserror::Error;

use crate::triangle::Curvature;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("invalid triangle parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {0} is not a positive integer")]
    NonIntegralIndex(String),

    #[error("parent signature has non-positive area measure {0}")]
    ZeroAreaParent(String),

    #[error("inconsistent transfer data: {0}")]
    InconsistentData(String),

    #[error("triangle group is {0}, not hyperbolic")]
    NotHyperbolic(Curvature),

    #[error("triangle group ({0}, {1}, {2}) is perfect")]
    PerfectGroup(u64, u64, u64),

    #[error("signature {0} is not the compact signature of a derived triangle subgroup")]
    NotADerivedShape(String),

    #[error("signature {0} has non-positive area measure")]
    ZeroAreaInput(String),

    #[error("kernel has genus 0; the Macbeath step needs a surface group of positive genus")]
    GenusZeroKernel,

    #[error("Riemann-Hurwitz genus is not a non-negative integer: {0}")]
    NonIntegralGenus(String),

    #[error("constraint violated: {0}")]
    ConstraintViolated(String),

    #[error("cross-check mismatch in {what}: expected {expected}, found {found}")]
    MismatchDetected {
        what: String,
        expected: String,
        found: String,
    },

    #[error("group order needs about {bits} bits, above the {limit}-bit limit")]
    OrderTooLarge { bits: u64, limit: u64 },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

impl Error {
    pub(crate) fn mismatch(
        what: impl Into<String>,
        expected: impl std::fmt::Display,
        found: impl std::fmt::Display,
    ) -> Self {
        Error::MismatchDetected {
            what: what.into(),
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
