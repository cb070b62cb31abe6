//! The imaginary quadratic order `O = Z[tau]` of a negative discriminant and
//! its element arithmetic.
//!
//! For discriminant `D < 0` with `D = 0 or 1 (mod 4)` the generator is
//!
//! ```text
//!   tau = sqrt(D/4)        if D = 0 (mod 4)
//!   tau = (1 + sqrt(D))/2  if D = 1 (mod 4)
//! ```
//!
//! so `tau^2 = t*tau - n` with trace `t in {0, 1}` and norm `n > 0`. Elements
//! are pairs `x + y*tau` over arbitrary-precision integers; the field norm is
//! `x^2 + t*x*y + n*y^2`. In the complex embedding `tau = (t + i*sqrt(|D|))/2`
//! for both parities.

mod ideal;
mod matrix;

pub use ideal::{
    enumerate_reduced_ideals_meeting, gauss_reduce, ideal_from_elements, ideal_from_generators,
    IdealLattice,
};
pub use matrix::{reduce_mod, reduce_mod_lattice, solve_integrality_coset, IntMatrix2};

use crate::numerics::{exact_sqrt, QuadComplex, QuadReal, Rational};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// The order of a given negative discriminant. Cheap to copy; every element
/// and ideal carries one.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Ring {
    delta: i64,
}

impl Ring {
    pub fn from_discriminant(delta: i64) -> Result<Ring> {
        if delta >= 0 || !matches!(delta.rem_euclid(4), 0 | 1) {
            return Err(Error::InvalidDiscriminant(delta));
        }
        Ok(Ring { delta })
    }

    pub fn discriminant(&self) -> i64 {
        self.delta
    }

    pub fn abs_delta(&self) -> u64 {
        self.delta.unsigned_abs()
    }

    /// Trace of tau: 1 when the discriminant is odd, else 0.
    pub fn tau_trace(&self) -> i64 {
        (self.delta.rem_euclid(4)) & 1
    }

    /// Norm of tau: tau^2 = t*tau - n.
    pub fn tau_norm(&self) -> i64 {
        if self.tau_trace() == 0 {
            -self.delta / 4
        } else {
            (1 - self.delta) / 4
        }
    }

    /// Radicand shared by every `QuadReal`/`QuadComplex` tied to this ring.
    pub fn radicand(&self) -> u64 {
        if self.tau_trace() == 0 {
            self.abs_delta() / 4
        } else {
            self.abs_delta()
        }
    }

    /// Conductor f where delta = f^2 * (fundamental discriminant).
    pub fn conductor(&self) -> u64 {
        let a = self.abs_delta();
        let mut f = 1u64;
        let mut k = 2u64;
        while k * k <= a {
            if a % (k * k) == 0 {
                let rest = -((a / (k * k)) as i64);
                if matches!(rest.rem_euclid(4), 0 | 1) {
                    f = k;
                }
            }
            k += 1;
        }
        f
    }

    pub fn is_maximal_order(&self) -> bool {
        self.conductor() == 1
    }

    /// tau as an exact complex value.
    pub fn tau(&self) -> QuadComplex {
        let d = self.radicand();
        if self.tau_trace() == 0 {
            QuadComplex::new(QuadReal::zero(d), QuadReal::sqrt_d(d))
        } else {
            QuadComplex::new(
                QuadReal::from_rational(d, crate::numerics::ratio(1, 2)),
                QuadReal::new(d, Rational::zero(), crate::numerics::ratio(1, 2)),
            )
        }
    }

    pub fn zero(&self) -> RingElement {
        self.from_xy(BigInt::zero(), BigInt::zero())
    }

    pub fn one(&self) -> RingElement {
        self.from_int(1)
    }

    pub fn el_tau(&self) -> RingElement {
        self.from_xy(BigInt::zero(), BigInt::from(1))
    }

    pub fn from_int(&self, v: i64) -> RingElement {
        self.from_xy(BigInt::from(v), BigInt::zero())
    }

    pub fn element(&self, x: i64, y: i64) -> RingElement {
        self.from_xy(BigInt::from(x), BigInt::from(y))
    }

    pub fn from_xy(&self, x: BigInt, y: BigInt) -> RingElement {
        RingElement { ring: *self, x, y }
    }

    /// Exact complex value of `x + y*tau` for rational coordinates.
    pub fn embed_xy(&self, x: &Rational, y: &Rational) -> QuadComplex {
        let d = self.radicand();
        let re = QuadReal::from_rational(
            d,
            x + y * Rational::new(self.tau_trace().into(), 2.into()),
        );
        let im_coeff = if self.tau_trace() == 0 {
            y.clone()
        } else {
            y / Rational::from_integer(2.into())
        };
        let im = QuadReal::new(d, Rational::zero(), im_coeff);
        QuadComplex::new(re, im)
    }

    /// Real-plane coordinates of `x + y*tau`.
    pub fn embed_xy_f64(&self, x: &Rational, y: &Rational) -> (f64, f64) {
        let xf = x.to_f64().unwrap_or(f64::NAN);
        let yf = y.to_f64().unwrap_or(f64::NAN);
        let half_root = (self.abs_delta() as f64).sqrt() / 2.0;
        (xf + yf * self.tau_trace() as f64 / 2.0, yf * half_root)
    }

    /// Inverse of the embedding: coordinates (x, y) with `z = x + y*tau`,
    /// or an error when `z` does not lie in the fraction field of the ring.
    pub fn xy_from_quad_complex(&self, z: &QuadComplex) -> Result<(Rational, Rational)> {
        let d = self.radicand();
        if z.radicand() != d {
            return Err(Error::RadicandMismatch(z.radicand(), d));
        }
        let (ra, rb) = (z.re().rational_part(), z.re().surd_part());
        let (ia, ib) = (z.im().rational_part(), z.im().surd_part());
        if let Some(s) = exact_sqrt(d) {
            // Folded radicand (|delta|/4 a perfect square, trace 0): all
            // parts are rational and tau = i*s.
            let s = Rational::from_integer(s.into());
            let re_total = ra + rb * &s;
            let im_total = ia + ib * &s;
            if s.is_zero() {
                return Err(Error::NotInField);
            }
            return Ok((re_total, im_total / s));
        }
        if !rb.is_zero() || !ia.is_zero() {
            return Err(Error::NotInField);
        }
        if self.tau_trace() == 0 {
            Ok((ra.clone(), ib.clone()))
        } else {
            let y = ib * Rational::from_integer(2.into());
            let x = ra - ib;
            Ok((x, y))
        }
    }

    /// Integral element from an exact complex value, if it lies in O.
    pub fn element_from_quad_complex(&self, z: &QuadComplex) -> Result<RingElement> {
        let (x, y) = self.xy_from_quad_complex(z)?;
        if !x.is_integer() || !y.is_integer() {
            return Err(Error::NotInField);
        }
        Ok(self.from_xy(x.to_integer(), y.to_integer()))
    }
}

/// An element `x + y*tau` of the order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    ring: Ring,
    x: BigInt,
    y: BigInt,
}

impl RingElement {
    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn x(&self) -> &BigInt {
        &self.x
    }

    pub fn y(&self) -> &BigInt {
        &self.y
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.x == BigInt::from(1) && self.y.is_zero()
    }

    pub fn conj(&self) -> RingElement {
        let t = BigInt::from(self.ring.tau_trace());
        self.ring
            .from_xy(&self.x + t * &self.y, -self.y.clone())
    }

    /// Field norm `|e|^2 = x^2 + t*x*y + n*y^2`; nonnegative integer.
    pub fn norm(&self) -> BigInt {
        let t = BigInt::from(self.ring.tau_trace());
        let n = BigInt::from(self.ring.tau_norm());
        &self.x * &self.x + t * &self.x * &self.y + n * &self.y * &self.y
    }

    pub fn trace(&self) -> BigInt {
        BigInt::from(2) * &self.x + BigInt::from(self.ring.tau_trace()) * &self.y
    }

    /// Exact division, when the quotient lies in O.
    pub fn checked_div(&self, rhs: &RingElement) -> Option<RingElement> {
        if rhs.is_zero() {
            return None;
        }
        let num = self.clone() * rhs.conj();
        let den = rhs.norm();
        let (qx, rx) = num_integer::Integer::div_rem(&num.x, &den);
        let (qy, ry) = num_integer::Integer::div_rem(&num.y, &den);
        if rx.is_zero() && ry.is_zero() {
            Some(self.ring.from_xy(qx, qy))
        } else {
            None
        }
    }

    pub fn divides(&self, other: &RingElement) -> bool {
        other.checked_div(self).is_some()
    }

    pub fn to_quad_complex(&self) -> QuadComplex {
        self.ring.embed_xy(
            &Rational::from_integer(self.x.clone()),
            &Rational::from_integer(self.y.clone()),
        )
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        self.ring.embed_xy_f64(
            &Rational::from_integer(self.x.clone()),
            &Rational::from_integer(self.y.clone()),
        )
    }

    /// Deterministic ordering key: by norm, then |y|, then y, then x. Puts
    /// rational integers ahead of elements with equal norm that use tau.
    pub fn canonical_key(&self) -> (BigInt, BigInt, BigInt, BigInt) {
        (self.norm(), self.y.abs(), self.y.clone(), self.x.clone())
    }

    fn assert_ring(&self, rhs: &RingElement) {
        assert_eq!(
            self.ring.delta, rhs.ring.delta,
            "elements of different rings"
        );
    }
}

impl Add for RingElement {
    type Output = RingElement;
    fn add(self, rhs: RingElement) -> RingElement {
        self.assert_ring(&rhs);
        self.ring.from_xy(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for RingElement {
    type Output = RingElement;
    fn sub(self, rhs: RingElement) -> RingElement {
        self.assert_ring(&rhs);
        self.ring.from_xy(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul for RingElement {
    type Output = RingElement;
    fn mul(self, rhs: RingElement) -> RingElement {
        self.assert_ring(&rhs);
        let t = BigInt::from(self.ring.tau_trace());
        let n = BigInt::from(self.ring.tau_norm());
        let yy = &self.y * &rhs.y;
        let x = &self.x * &rhs.x - &n * &yy;
        let y = &self.x * &rhs.y + &rhs.x * &self.y + t * yy;
        self.ring.from_xy(x, y)
    }
}

impl Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        self.ring.from_xy(-self.x, -self.y)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            return write!(f, "{}", self.x);
        }
        let tau_part = if self.y == BigInt::from(1) {
            "tau".to_string()
        } else if self.y == BigInt::from(-1) {
            "-tau".to_string()
        } else {
            format!("{}*tau", self.y)
        };
        if self.x.is_zero() {
            write!(f, "{}", tau_part)
        } else if tau_part.starts_with('-') {
            write!(f, "{}{}", self.x, tau_part)
        } else {
            write!(f, "{}+{}", self.x, tau_part)
        }
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(delta: i64) -> Ring {
        Ring::from_discriminant(delta).unwrap()
    }

    #[test]
    fn discriminant_validation() {
        assert!(Ring::from_discriminant(-23).is_ok());
        assert!(Ring::from_discriminant(-4).is_ok());
        assert!(Ring::from_discriminant(-7).is_ok());
        assert!(Ring::from_discriminant(-5).is_err());
        assert!(Ring::from_discriminant(-6).is_err());
        assert!(Ring::from_discriminant(4).is_err());
        assert!(Ring::from_discriminant(0).is_err());
    }

    #[test]
    fn tau_satisfies_its_quadratic() {
        for delta in [-3i64, -4, -7, -8, -11, -12, -15, -16, -19, -20, -23, -24, -48] {
            let r = ring(delta);
            let tau = r.tau();
            let lhs = tau.clone() * tau.clone();
            let t = Rational::from_integer(r.tau_trace().into());
            let n = Rational::from_integer(r.tau_norm().into());
            let rhs = tau.scale(&t) - QuadComplex::one(r.radicand()).scale(&n);
            assert_eq!(lhs, rhs, "delta {}", delta);
        }
    }

    #[test]
    fn conductor_values() {
        assert_eq!(ring(-23).conductor(), 1);
        assert_eq!(ring(-12).conductor(), 2);
        assert_eq!(ring(-16).conductor(), 2);
        assert_eq!(ring(-27).conductor(), 3);
        assert_eq!(ring(-36).conductor(), 3);
        assert_eq!(ring(-48).conductor(), 4);
        assert_eq!(ring(-3).conductor(), 1);
    }

    #[test]
    fn norm_matches_embedding() {
        for delta in [-23i64, -4, -12, -19] {
            let r = ring(delta);
            for (x, y) in [(3i64, -2i64), (0, 1), (7, 5), (-1, -1)] {
                let e = r.element(x, y);
                let via_embed = e.to_quad_complex().norm_sq();
                let expect = QuadReal::from_rational(
                    r.radicand(),
                    Rational::from_integer(e.norm()),
                );
                assert_eq!(via_embed, expect);
            }
        }
    }

    #[test]
    fn norm_is_multiplicative() {
        let r = ring(-23);
        let a = r.element(3, -2);
        let b = r.element(-1, 4);
        assert_eq!((a.clone() * b.clone()).norm(), a.norm() * b.norm());
    }

    #[test]
    fn conj_and_division() {
        let r = ring(-23);
        let a = r.element(7, -1);
        let prod = a.clone() * a.conj();
        assert_eq!(prod.x, a.norm());
        assert!(prod.y.is_zero());

        let b = r.element(2, 3);
        let ab = a.clone() * b.clone();
        assert_eq!(ab.checked_div(&b), Some(a.clone()));
        assert_eq!(ab.checked_div(&a), Some(b.clone()));
        assert_eq!(a.checked_div(&b), None);
        assert!(b.divides(&ab));
    }

    #[test]
    fn embedding_round_trip() {
        let r = ring(-23);
        let e = r.element(-4, 7);
        let z = e.to_quad_complex();
        let (x, y) = r.xy_from_quad_complex(&z).unwrap();
        assert_eq!(x, Rational::from_integer((-4).into()));
        assert_eq!(y, Rational::from_integer(7.into()));
        assert_eq!(r.element_from_quad_complex(&z).unwrap(), e);
    }

    #[test]
    fn embedding_round_trip_folded_radicand() {
        // |delta|/4 = 4 is a perfect square, so the surd collapses.
        let r = ring(-16);
        let e = r.element(3, -2);
        let z = e.to_quad_complex();
        assert_eq!(z.to_f64_pair(), (3.0, -4.0));
        assert_eq!(r.element_from_quad_complex(&z).unwrap(), e);

        let fractional = z.scale(&crate::numerics::ratio(1, 2));
        let (x, y) = r.xy_from_quad_complex(&fractional).unwrap();
        assert_eq!(x, crate::numerics::ratio(3, 2));
        assert_eq!(y, crate::numerics::ratio(-1, 1));
        assert!(r.element_from_quad_complex(&fractional).is_err());
    }

    #[test]
    fn display_formats() {
        let r = ring(-23);
        assert_eq!(r.element(7, -1).to_string(), "7-tau");
        assert_eq!(r.element(0, 1).to_string(), "tau");
        assert_eq!(r.element(-5, 0).to_string(), "-5");
        assert_eq!(r.element(4, -2).to_string(), "4-2*tau");
        assert_eq!(r.element(0, 0).to_string(), "0");
        assert_eq!(r.element(1, 60).to_string(), "1+60*tau");
    }
}
