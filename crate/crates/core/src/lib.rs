//! Exact continued fraction expansions over arbitrary imaginary quadratic orders.
//!
//! The classical nearest-integer complex continued fraction only works over the
//! five Euclidean imaginary quadratic rings. This crate implements the general
//! construction: coefficients are drawn from a finite set `B` of denominators
//! together with any algebraic integer numerator, and validity of a step is
//! governed by a family of discs that covers the plane once scaled by an
//! admissibility constant `eps < 1`. The main pieces:
//!
//! * [`numerics`] — the exact arithmetic tower (big rationals, real and complex
//!   quadratic extensions of `Q`) plus a configurable-precision binary float.
//! * [`ring`] — orders `Z[tau]` of discriminant `Delta < 0`, their elements,
//!   fractional ideals in Hermite normal form, shortest vectors and reduction.
//! * [`covering`] — disc covering instances, the minimal-`eps` computation,
//!   admissibility checks and searches for minimal denominator sets.
//! * [`cfrac`] — the expansion state machine: candidate coefficients, policies,
//!   convergents and rendering.
//! * [`analysis`] — quality-bound verification, brute-force best-approximation
//!   oracles, state graph exploration and periodicity detection.

pub mod analysis;
pub mod cfrac;
pub mod covering;
pub mod error;
pub mod numerics;
pub mod ring;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Library version, for embedding in emitted artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
