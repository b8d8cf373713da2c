//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field size {q} exceeds table budget {budget}")]
    BudgetExceeded { q: u128, budget: u64 },
    #[error("requested subfield is not a subfield of this field")]
    SubfieldMismatch,
    #[error("zero has no discrete logarithm")]
    ZeroHasNoDlog,
    #[error("character order {d} does not divide q-1 = {q1}")]
    OrderDoesNotDivide { d: u64, q1: u64 },
    #[error("operation requires a nontrivial character")]
    TrivialCharacter,
    #[error("{a} is not a quadratic residue mod {p}")]
    NonResidue { a: u64, p: u64 },
    #[error("no primitive representation x^2 + {d}y^2 = M exists")]
    NoRepresentation { d: u32 },
    #[error("operands live over different ground primes ({0} vs {1})")]
    MixedGroundPrime(u64, u64),
    #[error("result is not a rational integer: {0}")]
    ImpureResult(String),
    #[error("p = {p} = {residue} (mod 8) is not covered by any closed formula")]
    UnsupportedResidue { p: u64, residue: u64 },
    #[error("2^{m} does not divide q-1 (v2(q-1) = {v2})")]
    OrderNotDividing { m: u32, v2: u32 },
    #[error("m = 2 instance fails the quartic-case preconditions")]
    BelowThreshold,
    #[error("instance too large: {what} = {size} exceeds cap {cap}")]
    TooLarge { what: &'static str, size: u128, cap: u64 },
    #[error("numeric count residual {residual} exceeds 0.25 even after escalation")]
    ResidualTooLarge { residual: f64 },
    #[error("scale factors must be pairwise coprime: gcd({a}, {b}) > 1")]
    CoprimalityViolation { a: u64, b: u64 },
    #[error("divisibility requirement violated: {0}")]
    DivisibilityViolation(String),
    #[error("u = {u} is not semiprimitive: no l with u | p^l + 1 and 2l | s")]
    NotSemiprimitive { u: u64 },
    #[error("quadratic form must have an even number of variables, got {0}")]
    OddK(u32),
    #[error("quadratic form is degenerate (zero determinant)")]
    DegenerateForm,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
