//! Exact arithmetic tower and floating-point fallback.
//!
//! Every acceptance-critical computation runs on exact types: arbitrary
//! precision rationals, the real quadratic field `Q(sqrt(d))` and its complex
//! version `Q(sqrt(d)) + Q(sqrt(d)) i`, where `d = |Delta|` is fixed per run.
//! The binary float type exists for inputs outside that tower and for
//! rendering; it never decides an exact predicate.

mod big_float;
mod parse;
mod quad_complex;
mod quad_real;
mod value;

pub use big_float::{BigFloat, FloatComplex, DEFAULT_PRECISION_BITS};
pub use parse::{format_f64, parse_complex, parse_rational};
pub use quad_complex::QuadComplex;
pub use quad_real::QuadReal;
pub use value::ComplexValue;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Reduced fraction with positive denominator and arbitrary-precision parts.
pub type Rational = BigRational;

/// Shorthand for a rational from an integer pair; panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `sqrt(n)` if `n` is a perfect square.
pub(crate) fn exact_sqrt(n: u64) -> Option<u64> {
    let r = (n as f64).sqrt().round() as u64;
    for c in r.saturating_sub(1)..=r + 1 {
        if c * c == n {
            return Some(c);
        }
    }
    None
}
