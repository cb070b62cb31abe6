//! Elements `a + b sqrt(d)` of a real quadratic field, exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{exact_sqrt, BigFloat, Rational};

/// `a + b*sqrt(d)` with rational `a`, `b` and a fixed nonnegative radicand.
///
/// The representation is canonical: if `d` is a perfect square the surd part
/// is folded into the rational part at construction, so structural equality
/// and hashing agree with numerical equality. All binary operations require
/// matching radicands and panic otherwise; mixing radicands is a programming
/// error, not an input error.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadReal {
    d: u64,
    a: Rational,
    b: Rational,
}

impl QuadReal {
    pub fn new(d: u64, a: Rational, b: Rational) -> Self {
        match exact_sqrt(d) {
            Some(s) if !b.is_zero() => QuadReal {
                d,
                a: a + &b * Rational::from_integer(s.into()),
                b: Rational::zero(),
            },
            _ => QuadReal { d, a, b },
        }
    }

    pub fn from_rational(d: u64, a: Rational) -> Self {
        QuadReal { d, a, b: Rational::zero() }
    }

    pub fn from_int(d: u64, a: i64) -> Self {
        Self::from_rational(d, Rational::from_integer(a.into()))
    }

    pub fn zero(d: u64) -> Self {
        Self::from_int(d, 0)
    }

    pub fn one(d: u64) -> Self {
        Self::from_int(d, 1)
    }

    /// The pure surd `sqrt(d)`.
    pub fn sqrt_d(d: u64) -> Self {
        Self::new(d, Rational::zero(), Rational::one())
    }

    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn surd_part(&self) -> &Rational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Exact rational value, if the surd part vanishes.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.b.is_zero().then_some(&self.a)
    }

    /// Exact sign: -1, 0 or +1. Decided by case analysis on the signs of the
    /// two parts, comparing `a^2` against `b^2 d` when they disagree.
    pub fn sign(&self) -> i32 {
        let sa = rational_sign(&self.a);
        let sb = rational_sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // Opposite signs: |a| vs |b| sqrt(d) decides.
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * Rational::from_integer(self.d.into());
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// Field conjugate `a - b*sqrt(d)`.
    pub fn conj(&self) -> Self {
        QuadReal { d: self.d, a: self.a.clone(), b: -self.b.clone() }
    }

    /// `a^2 - b^2 d`, the field norm; zero only for the zero element.
    pub fn field_norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * Rational::from_integer(self.d.into())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero QuadReal");
        let n = self.field_norm();
        QuadReal { d: self.d, a: &self.conj().a / &n, b: &self.conj().b / &n }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QuadReal { d: self.d, a: &self.a * r, b: &self.b * r }
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN)
            + self.b.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt()
    }

    /// Rendering into the binary float type at the given precision.
    pub fn to_big_float(&self, prec: u32) -> BigFloat {
        let fa = BigFloat::from_rational(&self.a, prec);
        if self.b.is_zero() {
            return fa;
        }
        let fb = BigFloat::from_rational(&self.b, prec);
        let sd = BigFloat::from_u64(self.d, prec).sqrt();
        fa.add(&fb.mul(&sd))
    }

    fn assert_same(&self, rhs: &Self) {
        assert_eq!(self.d, rhs.d, "mismatched radicands {} vs {}", self.d, rhs.d);
    }
}

fn rational_sign(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialOrd for QuadReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.assert_same(other);
        let diff = self.clone() - other.clone();
        match diff.sign() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }
}

impl Add for QuadReal {
    type Output = QuadReal;
    fn add(self, rhs: QuadReal) -> QuadReal {
        self.assert_same(&rhs);
        QuadReal { d: self.d, a: self.a + rhs.a, b: self.b + rhs.b }
    }
}

impl Sub for QuadReal {
    type Output = QuadReal;
    fn sub(self, rhs: QuadReal) -> QuadReal {
        self.assert_same(&rhs);
        QuadReal { d: self.d, a: self.a - rhs.a, b: self.b - rhs.b }
    }
}

impl Mul for QuadReal {
    type Output = QuadReal;
    fn mul(self, rhs: QuadReal) -> QuadReal {
        self.assert_same(&rhs);
        let d = Rational::from_integer(self.d.into());
        QuadReal {
            d: self.d,
            a: &self.a * &rhs.a + &self.b * &rhs.b * d,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

impl Div for QuadReal {
    type Output = QuadReal;
    fn div(self, rhs: QuadReal) -> QuadReal {
        self.assert_same(&rhs);
        self * rhs.recip()
    }
}

impl Neg for QuadReal {
    type Output = QuadReal;
    fn neg(self) -> QuadReal {
        QuadReal { d: self.d, a: -self.a, b: -self.b }
    }
}

impl fmt::Display for QuadReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.a.is_zero() {
            return write!(f, "{}*sqrt({})", self.b, self.d);
        }
        if self.b.is_positive() {
            write!(f, "{}+{}*sqrt({})", self.a, self.b, self.d)
        } else {
            write!(f, "{}{}*sqrt({})", self.a, self.b, self.d)
        }
    }
}

impl fmt::Debug for QuadReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ratio;

    #[test]
    fn sign_cases() {
        // 6/3 - (2/3) sqrt(5) = 2 - 0.666*2.236 > 0.
        let x = QuadReal::new(5, ratio(6, 3), ratio(-2, 3));
        assert_eq!(x.sign(), 1);
        // sqrt(2) - 3/2 < 0 ... 2 < 9/4.
        let y = QuadReal::new(2, ratio(-3, 2), ratio(1, 1));
        assert_eq!(y.sign(), -1);
        // 2 - sqrt(4) = 0 exactly (square radicand folds away).
        let z = QuadReal::new(4, ratio(2, 1), ratio(-1, 1));
        assert_eq!(z.sign(), 0);
        assert!(z.is_zero());
        assert_eq!(QuadReal::zero(23).sign(), 0);
    }

    #[test]
    fn square_radicand_folds_to_canonical_form() {
        let x = QuadReal::new(4, ratio(1, 2), ratio(3, 4));
        let y = QuadReal::new(4, ratio(2, 1), ratio(0, 1));
        assert_eq!(x, y);
        assert!(x.is_rational());
    }

    #[test]
    fn arithmetic_round_trip() {
        let x = QuadReal::new(23, ratio(3, 7), ratio(-5, 2));
        let y = QuadReal::new(23, ratio(-1, 3), ratio(4, 9));
        let z = (x.clone() * y.clone()).div(y.clone());
        assert_eq!(z, x);
        let w = (x.clone() + y.clone()) - y.clone();
        assert_eq!(w, x);
        assert_eq!((x.clone() - x.clone()).sign(), 0);
    }

    #[test]
    fn ordering_is_exact_near_ties() {
        // 3363/2378 is a convergent of sqrt(2): difference ~ 8.8e-8.
        let approx = QuadReal::from_rational(2, ratio(3363, 2378));
        let surd = QuadReal::sqrt_d(2);
        assert!(approx > surd);
        let approx2 = QuadReal::from_rational(2, ratio(1393, 985));
        assert!(approx2 < surd);
    }

    #[test]
    fn float_rendering_matches_f64() {
        let x = QuadReal::new(23, ratio(3, 7), ratio(-5, 2));
        let via_big = x.to_big_float(128).to_f64();
        assert!((via_big - x.to_f64()).abs() <= 1e-14);
    }
}
