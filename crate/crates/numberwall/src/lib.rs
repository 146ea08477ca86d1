//! Number Walls over prime fields, automatic tilings, and deficiency certification.
//!
//! The crate computes Number Walls (arrays of Toeplitz determinants) of
//! sequences over F_p, detects their zero windows, discovers two-dimensional
//! substitution-plus-coding systems that generate the walls, and checks a
//! chain of certificates showing that the Paper-Folding wall over F_3 has
//! bounded deficiency.

pub mod discovery;
pub mod field;
pub mod grid;
pub mod laurent;
pub mod seq;
pub mod tiling;
pub mod verify;
pub mod wall;
pub mod windows;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("division by zero in F_p")]
    DivisionByZero,
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("sequence index {index} outside defined domain [{lo}, {hi}]")]
    IndexOutOfDomain { index: i64, lo: i64, hi: i64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("discovery failed: {0}")]
    Discovery(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
