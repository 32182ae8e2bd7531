//! Numerical laboratory for the large sieve with square moduli.
//!
//! The crate evaluates both sides of the classical large-sieve story when the
//! sample points are Farey fractions `a/q^2`: exact enumeration and window
//! counting of the fractions, evaluation of the trigonometric polynomial
//! `S(alpha) = sum a_n e(n alpha)` and of the sieve sum `sum |S(a/q^2)|^2`,
//! exact quadratic Gauss sums, square-root counting modulo `k`, kernel
//! Fourier pairs, oscillatory integrals, and the bound shapes the sieve
//! estimates are made of. Everything is checked against brute-force oracles
//! at desk scale; none of the unspecified absolute constants are asserted,
//! only measured as ratios.

// `!(x >= lo)` guards reject NaN along with the out-of-range values; the
// suggested `x < lo` would let NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod arith;
pub mod bounds;
pub mod congruence;
pub mod expsum;
pub mod farey;
pub mod gauss;
pub mod numeric;
pub mod report;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} must be positive (got 0)")]
    ZeroInput { what: &'static str },
    #[error("integer overflow in {op}")]
    Overflow { op: &'static str },
    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: i64, m: u64 },
    #[error("{what}: arguments must be coprime (gcd = {gcd})")]
    NotCoprime { what: &'static str, gcd: u64 },
    #[error("{what} = {value} out of range {range}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("quadrature did not converge: error estimate {estimate:e} > tolerance {tolerance:e}")]
    NonConvergence { estimate: f64, tolerance: f64 },
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("missing parameter `{0}`")]
    MissingParam(String),
    #[error("unexpected parameter `{0}`")]
    ExtraParam(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("postcondition failed in {what}: {detail}")]
    Postcondition { what: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
