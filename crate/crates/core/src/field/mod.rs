//! Finite-field carriers: packed F_2 linear algebra and F_{2^t} arithmetic.

mod gf2;
mod gf2m;

use thiserror::Error;

pub use gf2::{gf2_rank, BitMatrix, BitVector};
pub use gf2m::{
    field_mul, field_trace, find_self_dual_basis, is_irreducible, kappa, kappa_inv, smallest_irreducible,
    FieldElement, FieldSpec, MAX_T,
};

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("field degree {0} unsupported (need 1..=12)")]
    UnsupportedDegree(u32),
    #[error("polynomial {0:#b} is not irreducible of the requested degree")]
    NotIrreducible(u32),
    #[error("basis is not self-dual under the trace form")]
    NotSelfDual,
    #[error("elements belong to different fields")]
    SpecMismatch,
    #[error("value {value} outside field of size {size}")]
    OutOfRange { value: u32, size: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("parse error: {0}")]
    Parse(String),
}
