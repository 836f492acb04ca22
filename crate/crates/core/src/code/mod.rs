//! Code parameter derivation, erasure-pattern enumeration, exhaustive
//! maximal-recoverability verification, minimum distance, and erasure
//! decoding.

mod decode;
#[cfg(test)]
mod tests;
mod distance;
mod pattern;
mod profile;
mod verify;

pub use decode::{decode_erasures, decode_hierarchical};
pub use distance::min_distance;
pub use pattern::{
    e_set_count, enumerate_e_sets, enumerate_erasure_patterns, enumerate_mid_patterns,
    pattern_count, sample_pattern, ErasurePattern, PatternIter,
};
pub use profile::{CodeProfile, Variant};
pub use verify::{
    middle_parity_check, verify_data_local_mrc, verify_hdl_mrc, verify_hl_mrc, verify_local_mrc,
    verify_mds, verify_mrc, FailureWitness, MdsMode, VerificationReport, VerifyMode,
    VerifyOptions,
};

use thiserror::Error;

use crate::field::FieldError;
use crate::matrix::MatrixError;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("divisibility violation: {condition}")]
    DivisibilityViolation { condition: String },
    #[error("bad parameter: {reason}")]
    BadParameter { reason: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("code has dimension zero")]
    ZeroDimensionalCode,
    #[error("unrecoverable erasure pattern (rank deficit {deficit})")]
    UnrecoverablePattern { deficit: usize },
    #[error("received word is inconsistent with the code")]
    InconsistentReceived,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Field(#[from] FieldError),
}
