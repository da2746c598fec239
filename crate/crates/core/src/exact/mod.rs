//! Exact arithmetic: elements of `Z[1/b]`, determinant-1 matrices over them, and
//! abstract group words with matrix evaluation.

mod matrix;
mod scalar;
mod word;

use num_bigint::BigInt;
use num_integer::Integer;
use thiserror::Error;

pub use matrix::UniModularMatrix;
pub(crate) use scalar::mod_inverse;
pub use scalar::LocalizedScalar;
pub use word::{evaluate_word, GeneratorAssignment, GroupWord, Symbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("{value} is not in Z[1/{base}]")]
    NotInLocalization { value: String, base: BigInt },
    #[error("determinant is not 1: {0}")]
    DeterminantNotOne(String),
    #[error("no matrix assigned to generator {0}")]
    UnknownSymbol(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid Moebius parameters a={a}, b={b}: {reason}")]
    InvalidParameters {
        a: u64,
        b: u64,
        reason: &'static str,
    },
}

/// Checks `a >= 1`, `b > 1` and `gcd(a, b) = 1`.
pub fn check_parameters(a: u64, b: u64) -> Result<(), ExactError> {
    let reason = if a == 0 {
        "a must be positive"
    } else if b <= 1 {
        "b must exceed 1"
    } else if a.gcd(&b) != 1 {
        "a and b must be coprime"
    } else {
        return Ok(());
    };
    Err(ExactError::InvalidParameters { a, b, reason })
}

/// The parabolic generators `A(a/b)` and `B(a/b)`.
pub fn make_moebius_generators(
    a: u64,
    b: u64,
) -> Result<(UniModularMatrix, UniModularMatrix), ExactError> {
    check_parameters(a, b)?;
    let m = LocalizedScalar::new(a, b)?;
    Ok((
        UniModularMatrix::upper_unipotent(m.clone()),
        UniModularMatrix::lower_unipotent(m),
    ))
}
