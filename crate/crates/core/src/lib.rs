//! Erasure codes with two-level hierarchical locality: parity-check
//! construction, maximal-recoverability verification by exhaustive erasure
//! pattern rank checks, hierarchical erasure decoding, and evaluation of
//! distance and field-size bounds.

pub mod arith;
pub mod bounds;
pub mod code;
pub mod constructions;
pub mod field;
pub mod io;
pub mod kwise;
pub mod matrix;
pub mod selftest;
