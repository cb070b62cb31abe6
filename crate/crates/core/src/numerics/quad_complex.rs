//! Complex numbers with real and imaginary parts in `Q(sqrt(d))`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::Zero;

use super::{FloatComplex, QuadReal, Rational};

/// `re + im*i` with both parts in the real quadratic field of radicand `d`.
///
/// With `d = |Delta|` this contains the imaginary quadratic field `K` of
/// discriminant `Delta` (via `sqrt(Delta) = i sqrt(d)`) and, beyond it, every
/// complex number whose parts live in `Q(sqrt(d))`; that is enough for the
/// expansion orbit of any input the grammar accepts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadComplex {
    re: QuadReal,
    im: QuadReal,
}

impl QuadComplex {
    pub fn new(re: QuadReal, im: QuadReal) -> Self {
        assert_eq!(re.radicand(), im.radicand(), "mismatched radicands");
        QuadComplex { re, im }
    }

    pub fn zero(d: u64) -> Self {
        QuadComplex { re: QuadReal::zero(d), im: QuadReal::zero(d) }
    }

    pub fn one(d: u64) -> Self {
        QuadComplex { re: QuadReal::one(d), im: QuadReal::zero(d) }
    }

    pub fn from_rationals(d: u64, re: Rational, im: Rational) -> Self {
        QuadComplex {
            re: QuadReal::from_rational(d, re),
            im: QuadReal::from_rational(d, im),
        }
    }

    pub fn radicand(&self) -> u64 {
        self.re.radicand()
    }

    pub fn re(&self) -> &QuadReal {
        &self.re
    }

    pub fn im(&self) -> &QuadReal {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        QuadComplex { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `|z|^2 = re^2 + im^2`, exact in `Q(sqrt(d))`.
    pub fn norm_sq(&self) -> QuadReal {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero QuadComplex");
        let n = self.norm_sq();
        let c = self.conj();
        QuadComplex { re: c.re / n.clone(), im: c.im / n }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QuadComplex { re: self.re.scale(r), im: self.im.scale(r) }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn to_float_complex(&self, prec: u32) -> FloatComplex {
        FloatComplex::new(self.re.to_big_float(prec), self.im.to_big_float(prec))
    }
}

impl Add for QuadComplex {
    type Output = QuadComplex;
    fn add(self, rhs: QuadComplex) -> QuadComplex {
        QuadComplex { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for QuadComplex {
    type Output = QuadComplex;
    fn sub(self, rhs: QuadComplex) -> QuadComplex {
        QuadComplex { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Mul for QuadComplex {
    type Output = QuadComplex;
    fn mul(self, rhs: QuadComplex) -> QuadComplex {
        let re = self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone();
        let im = self.re * rhs.im + self.im * rhs.re;
        QuadComplex { re, im }
    }
}

impl Div for QuadComplex {
    type Output = QuadComplex;
    fn div(self, rhs: QuadComplex) -> QuadComplex {
        self * rhs.recip()
    }
}

impl Neg for QuadComplex {
    type Output = QuadComplex;
    fn neg(self) -> QuadComplex {
        QuadComplex { re: -self.re, im: -self.im }
    }
}

impl fmt::Display for QuadComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let needs_group = !self.im.is_rational() && !self.im.rational_part().is_zero();
        if needs_group {
            write!(f, "{}+({})i", self.re, self.im)
        } else if self.im.sign() >= 0 {
            write!(f, "{}+{}i", self.re, self.im)
        } else {
            write!(f, "{}{}i", self.re, self.im)
        }
    }
}

impl fmt::Debug for QuadComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ratio;

    fn qc(d: u64, ra: (i64, i64), rb: (i64, i64), ia: (i64, i64), ib: (i64, i64)) -> QuadComplex {
        QuadComplex::new(
            QuadReal::new(d, ratio(ra.0, ra.1), ratio(rb.0, rb.1)),
            QuadReal::new(d, ratio(ia.0, ia.1), ratio(ib.0, ib.1)),
        )
    }

    #[test]
    fn norm_sq_of_tau_for_disc_minus_23() {
        // tau = 1/2 + (sqrt(23)/2) i has |tau|^2 = 1/4 + 23/4 = 6.
        let tau = qc(23, (1, 2), (0, 1), (0, 1), (1, 2));
        assert_eq!(tau.norm_sq(), QuadReal::from_int(23, 6));
    }

    #[test]
    fn division_round_trips() {
        let w = qc(23, (3, 5), (-1, 2), (7, 3), (2, 9));
        let v = qc(23, (-2, 7), (1, 3), (0, 1), (5, 4));
        let q = w.clone().div(v.clone());
        assert_eq!(q * v, w);
    }

    #[test]
    fn norm_multiplicative() {
        let w = qc(23, (3, 5), (-1, 2), (7, 3), (2, 9));
        let v = qc(23, (-2, 7), (1, 3), (0, 1), (5, 4));
        let lhs = (w.clone() * v.clone()).norm_sq();
        let rhs = w.norm_sq() * v.norm_sq();
        assert_eq!(lhs, rhs);
    }
}
