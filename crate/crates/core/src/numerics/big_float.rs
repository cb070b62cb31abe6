//! Binary floating point with configurable mantissa precision.
//!
//! A value is `mant * 2^exp` with `2^(prec-1) <= |mant| < 2^prec` (or exactly
//! zero). Rounding is round-to-nearest with ties away from zero, and addition
//! of wildly mismatched magnitudes may drop the smaller operand; both effects
//! stay below a couple of units in the last place, which the callers absorb
//! in explicit safety margins. Exact predicates are never decided here.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::Rational;

/// Default mantissa size in bits for float-mode computations.
pub const DEFAULT_PRECISION_BITS: u32 = 128;

#[derive(Clone)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

impl BigFloat {
    pub fn zero(prec: u32) -> Self {
        BigFloat { mant: BigInt::zero(), exp: 0, prec }
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Self {
        normalize(v.clone(), 0, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_bigint(&BigInt::from(v), prec)
    }

    pub fn from_u64(v: u64, prec: u32) -> Self {
        Self::from_bigint(&BigInt::from(v), prec)
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        let num = r.numer();
        let den = r.denom();
        if num.is_zero() {
            return Self::zero(prec);
        }
        let shift = (prec as i64 + 3 + den.bits() as i64 - num.bits() as i64).max(0) as u64;
        let q = (num << shift) / den;
        normalize(q, -(shift as i64), prec)
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        let r = Rational::from_float(v).expect("finite float required");
        Self::from_rational(&r, prec)
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn sign(&self) -> i32 {
        if self.mant.is_zero() {
            0
        } else if self.mant.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn neg(&self) -> Self {
        BigFloat { mant: -self.mant.clone(), exp: self.exp, prec: self.prec }
    }

    pub fn abs(&self) -> Self {
        BigFloat { mant: self.mant.abs(), exp: self.exp, prec: self.prec }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let prec = self.prec.max(rhs.prec);
        if self.is_zero() {
            return normalize(rhs.mant.clone(), rhs.exp, prec);
        }
        if rhs.is_zero() {
            return normalize(self.mant.clone(), self.exp, prec);
        }
        let (hi, lo) = if self.exp >= rhs.exp { (self, rhs) } else { (rhs, self) };
        let diff = (hi.exp - lo.exp) as u64;
        if diff > prec as u64 + 4 {
            // The smaller operand is below half an ulp of the result.
            return normalize(hi.mant.clone(), hi.exp, prec);
        }
        let m = (&hi.mant << diff) + &lo.mant;
        normalize(m, lo.exp, prec)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let prec = self.prec.max(rhs.prec);
        normalize(&self.mant * &rhs.mant, self.exp + rhs.exp, prec)
    }

    pub fn div(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero BigFloat");
        let prec = self.prec.max(rhs.prec);
        if self.is_zero() {
            return Self::zero(prec);
        }
        let shift =
            (prec as i64 + 3 + rhs.mant.bits() as i64 - self.mant.bits() as i64).max(0) as u64;
        let q = (&self.mant << shift) / &rhs.mant;
        normalize(q, self.exp - rhs.exp - shift as i64, prec)
    }

    /// Nonnegative square root; panics on negative input.
    pub fn sqrt(&self) -> Self {
        assert!(self.sign() >= 0, "sqrt of negative BigFloat");
        if self.is_zero() {
            return Self::zero(self.prec);
        }
        let mut shift = (2 * self.prec as i64 + 4 - self.mant.bits() as i64).max(0) as u64;
        if (self.exp - shift as i64) % 2 != 0 {
            shift += 1;
        }
        let r = (&self.mant << shift).sqrt();
        normalize(r, (self.exp - shift as i64) / 2, self.prec)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        BigFloat { mant: self.mant.clone(), exp: self.exp + k, prec: self.prec }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let shift = bits as i64 - 54;
        let (m, e) = if shift > 0 {
            ((&self.mant >> shift as u64).to_f64().unwrap(), self.exp + shift)
        } else {
            (self.mant.to_f64().unwrap(), self.exp)
        };
        if e > 2000 {
            return if m > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        if e < -2000 {
            return 0.0;
        }
        // Split the power to stay inside powi's exponent range.
        if e.abs() > 1000 {
            m * 2f64.powi(1000 * e.signum() as i32) * 2f64.powi((e - 1000 * e.signum()) as i32)
        } else {
            m * 2f64.powi(e as i32)
        }
    }

    /// Exact comparison (the representation is exact even if ops round).
    pub fn cmp_exact(&self, rhs: &Self) -> Ordering {
        let s = self.sign().cmp(&rhs.sign());
        if s != Ordering::Equal || self.sign() == 0 {
            return s;
        }
        let msb_l = self.exp + self.mant.bits() as i64;
        let msb_r = rhs.exp + rhs.mant.bits() as i64;
        if msb_l != msb_r {
            let mag = msb_l.cmp(&msb_r);
            return if self.sign() > 0 { mag } else { mag.reverse() };
        }
        let diff = self.exp - rhs.exp;
        if diff >= 0 {
            (&self.mant << diff as u64).cmp(&rhs.mant)
        } else {
            self.mant.cmp(&(&rhs.mant << (-diff) as u64))
        }
    }
}

fn normalize(mant: BigInt, exp: i64, prec: u32) -> BigFloat {
    if mant.is_zero() {
        return BigFloat::zero(prec);
    }
    let bits = mant.bits();
    if bits > prec as u64 {
        let shift = bits - prec as u64;
        let half: BigInt = BigInt::from(1) << (shift - 1);
        let rounded = if mant.is_positive() {
            (&mant + &half) >> shift
        } else {
            -((-&mant + &half) >> shift)
        };
        // Rounding can carry into one extra bit; renormalize once.
        return normalize(rounded, exp + shift as i64, prec);
    }
    if bits < prec as u64 {
        let shift = prec as u64 - bits;
        return BigFloat { mant: mant << shift, exp: exp - shift as i64, prec };
    }
    BigFloat { mant, exp, prec }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_exact(other) == Ordering::Equal
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_exact(other))
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat({:e} @{}b)", self.to_f64(), self.prec)
    }
}

/// Complex pair of [`BigFloat`]s.
#[derive(Clone, Debug)]
pub struct FloatComplex {
    re: BigFloat,
    im: BigFloat,
}

impl FloatComplex {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        FloatComplex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        FloatComplex { re: BigFloat::zero(prec), im: BigFloat::zero(prec) }
    }

    pub fn from_f64_pair(re: f64, im: f64, prec: u32) -> Self {
        FloatComplex { re: BigFloat::from_f64(re, prec), im: BigFloat::from_f64(im, prec) }
    }

    pub fn re(&self) -> &BigFloat {
        &self.re
    }

    pub fn im(&self) -> &BigFloat {
        &self.im
    }

    pub fn precision(&self) -> u32 {
        self.re.precision().max(self.im.precision())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        FloatComplex { re: self.re.add(&rhs.re), im: self.im.add(&rhs.im) }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        FloatComplex { re: self.re.sub(&rhs.re), im: self.im.sub(&rhs.im) }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        FloatComplex {
            re: self.re.mul(&rhs.re).sub(&self.im.mul(&rhs.im)),
            im: self.re.mul(&rhs.im).add(&self.im.mul(&rhs.re)),
        }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero FloatComplex");
        let n = rhs.norm_sq();
        let c = FloatComplex { re: rhs.re.clone(), im: rhs.im.neg() };
        let p = self.mul(&c);
        FloatComplex { re: p.re.div(&n), im: p.im.div(&n) }
    }

    pub fn neg(&self) -> Self {
        FloatComplex { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn norm_sq(&self) -> BigFloat {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ratio;

    fn relative_gap(x: &BigFloat, y: &BigFloat) -> f64 {
        let diff = x.sub(y).abs();
        if diff.is_zero() {
            return 0.0;
        }
        diff.div(&y.abs()).to_f64()
    }

    #[test]
    fn rational_round_trip_accuracy() {
        let r = ratio(-314159265358979, 271828182845904);
        let f = BigFloat::from_rational(&r, 128);
        assert!((f.to_f64() - (-314159265358979.0 / 271828182845904.0)).abs() < 1e-15);
    }

    #[test]
    fn sqrt_squares_back() {
        let x = BigFloat::from_rational(&ratio(23, 1), 160);
        let s = x.sqrt();
        assert!(relative_gap(&s.mul(&s), &x) < 1e-45);
    }

    #[test]
    fn division_inverse() {
        let a = BigFloat::from_rational(&ratio(355, 113), 128);
        let b = BigFloat::from_rational(&ratio(-113, 998), 128);
        let q = a.div(&b);
        assert!(relative_gap(&q.mul(&b), &a) < 1e-36);
    }

    #[test]
    fn exact_compare_with_misaligned_exponents() {
        let a = BigFloat::from_i64(1, 64).mul_pow2(-200);
        let b = BigFloat::from_i64(1, 64).mul_pow2(-201);
        assert!(a > b);
        assert!(b.sign() > 0);
        let z = BigFloat::zero(64);
        assert!(b > z);
        assert_eq!(z.cmp_exact(&BigFloat::zero(32)), std::cmp::Ordering::Equal);
    }

    #[test]
    fn magnitude_mismatch_add_keeps_big_operand() {
        let big = BigFloat::from_i64(1 << 60, 64);
        let tiny = BigFloat::from_i64(1, 64).mul_pow2(-300);
        let s = big.add(&tiny);
        assert_eq!(s.cmp_exact(&big), std::cmp::Ordering::Equal);
    }

    #[test]
    fn complex_division_round_trips() {
        let w = FloatComplex::from_f64_pair(1.25, -2.5, 128);
        let v = FloatComplex::from_f64_pair(-0.75, 0.125, 128);
        let q = w.div(&v);
        let back = q.mul(&v);
        assert!(relative_gap(&back.re, &w.re) < 1e-30);
        assert!(relative_gap(&back.im, &w.im) < 1e-30);
    }
}
