//! Tagged union over the exact tower and the float fallback.

use std::fmt;

use super::{FloatComplex, QuadComplex};

/// A complex number that is either exact (parts in `Q(sqrt(d))`) or a
/// configurable-precision float. A single expansion run never mixes modes.
#[derive(Clone, Debug)]
pub enum ComplexValue {
    Exact(QuadComplex),
    Float(FloatComplex),
}

impl ComplexValue {
    pub fn is_exact(&self) -> bool {
        matches!(self, ComplexValue::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&QuadComplex> {
        match self {
            ComplexValue::Exact(z) => Some(z),
            ComplexValue::Float(_) => None,
        }
    }

    pub fn as_float(&self) -> Option<&FloatComplex> {
        match self {
            ComplexValue::Float(z) => Some(z),
            ComplexValue::Exact(_) => None,
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        match self {
            ComplexValue::Exact(z) => z.to_f64_pair(),
            ComplexValue::Float(z) => z.to_f64_pair(),
        }
    }

    pub fn norm_sq_f64(&self) -> f64 {
        let (x, y) = self.to_f64_pair();
        x * x + y * y
    }
}

impl fmt::Display for ComplexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexValue::Exact(z) => write!(f, "{}", z),
            ComplexValue::Float(z) => {
                let (x, y) = z.to_f64_pair();
                if y >= 0.0 {
                    write!(f, "{}+{}i", super::format_f64(x), super::format_f64(y))
                } else {
                    write!(f, "{}{}i", super::format_f64(x), super::format_f64(y))
                }
            }
        }
    }
}
