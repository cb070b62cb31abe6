//! Text input for complex numbers, and float rendering.
//!
//! Accepted complex forms, with `R` a real literal:
//!   `R + R i`, `R - R i`, `R i`, `R`
//! and `R` one of
//!   `[-]digits[.digits]`, `[-]p/q`, `[-]p/q*sqrt(g)`, `[-]sqrt(g)`
//! where `g` must equal the fixed radicand `|Delta|`. Decimal literals are
//! read as exact rationals (1.26 is 126/100), never as binary floats.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{QuadComplex, QuadReal, Rational};
use crate::error::Error;
use crate::Result;

/// Parse a rational literal: integer, fraction `p/q`, or decimal.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let s = input.trim();
    let bad = || Error::Parse(format!("invalid rational literal {:?}", input));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p.parse().map_err(|_| bad())?;
        let den: BigInt = q.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {:?}", input)));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.starts_with('-');
        let int: BigInt = if int_part == "-" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        let frac: BigInt = frac_part.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let magnitude = int.magnitude().clone() * scale.magnitude() + frac.magnitude();
        let value = Rational::new(BigInt::from(magnitude), scale);
        return Ok(if negative { -value } else { value });
    }
    let int: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(int))
}

fn parse_real(input: &str, d: u64) -> Result<QuadReal> {
    let s = input.trim();
    if let Some(idx) = s.find("sqrt(") {
        if !s.ends_with(')') {
            return Err(Error::Parse(format!("unterminated sqrt in {:?}", input)));
        }
        let g: u64 = s[idx + 5..s.len() - 1]
            .parse()
            .map_err(|_| Error::Parse(format!("invalid radicand in {:?}", input)))?;
        if g != d {
            return Err(Error::Parse(format!(
                "radicand {} not supported: this ring fixes sqrt({})",
                g, d
            )));
        }
        let coeff_str = &s[..idx];
        let coeff = match coeff_str {
            "" => Rational::one(),
            "-" => -Rational::one(),
            _ => {
                let trimmed = coeff_str
                    .strip_suffix('*')
                    .ok_or_else(|| Error::Parse(format!("expected '*sqrt' in {:?}", input)))?;
                parse_rational(trimmed)?
            }
        };
        return Ok(QuadReal::new(d, Rational::zero(), coeff));
    }
    Ok(QuadReal::from_rational(d, parse_rational(s)?))
}

/// Parse a complex literal into the exact tower over radicand `d`.
pub fn parse_complex(input: &str, d: u64) -> Result<QuadComplex> {
    let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty complex literal".into()));
    }
    // Locate the separating sign: the first +/- past index 0 that is not
    // inside a sqrt(...) group and not part of a fraction or product.
    let bytes = compact.as_bytes();
    let mut split = None;
    let mut depth = 0usize;
    for (i, &c) in bytes.iter().enumerate().skip(1) {
        match c {
            b'(' => depth += 1,
            b')' => depth = depth.saturating_sub(1),
            b'+' | b'-' if depth == 0 => {
                let prev = bytes[i - 1];
                if prev != b'/' && prev != b'*' {
                    split = Some(i);
                    break;
                }
            }
            _ => {}
        }
    }
    match split {
        Some(i) => {
            let re = parse_real(&compact[..i], d)?;
            let rest = &compact[i..];
            let im_str = rest
                .strip_suffix('i')
                .ok_or_else(|| Error::Parse(format!("missing trailing 'i' in {:?}", input)))?;
            let im = parse_real(im_str, d)?;
            Ok(QuadComplex::new(re, im))
        }
        None => {
            if let Some(im_str) = compact.strip_suffix('i') {
                let im = parse_real(im_str, d)?;
                Ok(QuadComplex::new(QuadReal::zero(d), im))
            } else {
                let re = parse_real(&compact, d)?;
                Ok(QuadComplex::new(re, QuadReal::zero(d)))
            }
        }
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ratio;

    #[test]
    fn decimal_input_becomes_exact_rational() {
        let z = parse_complex("-1.26+0.48i", 23).unwrap();
        assert_eq!(z.re().as_rational().unwrap(), &ratio(-63, 50));
        assert_eq!(z.im().as_rational().unwrap(), &ratio(12, 25));
    }

    #[test]
    fn fraction_pair() {
        let z = parse_complex("3/4+5/4i", 11).unwrap();
        assert_eq!(z.re().as_rational().unwrap(), &ratio(3, 4));
        assert_eq!(z.im().as_rational().unwrap(), &ratio(5, 4));
    }

    #[test]
    fn surd_imaginary_part_is_tau() {
        let z = parse_complex("1/2+1/2*sqrt(23)i", 23).unwrap();
        assert_eq!(z.re().as_rational().unwrap(), &ratio(1, 2));
        assert_eq!(z.im(), &QuadReal::new(23, ratio(0, 1), ratio(1, 2)));
    }

    #[test]
    fn negative_imaginary_separator() {
        let z = parse_complex("0.95-0.62i", 23).unwrap();
        assert_eq!(z.re().as_rational().unwrap(), &ratio(19, 20));
        assert_eq!(z.im().as_rational().unwrap(), &ratio(-31, 50));
    }

    #[test]
    fn foreign_radicand_rejected() {
        assert!(parse_complex("1/2+1/2*sqrt(5)i", 23).is_err());
    }

    #[test]
    fn pure_forms() {
        let re_only = parse_complex("1/2", 23).unwrap();
        assert!(re_only.im().is_zero());
        let im_only = parse_complex("-0.5i", 23).unwrap();
        assert!(im_only.re().is_zero());
        assert_eq!(im_only.im().as_rational().unwrap(), &ratio(-1, 2));
    }

    #[test]
    fn garbage_rejected() {
        assert!(parse_complex("", 23).is_err());
        assert!(parse_complex("1/0+2i", 23).is_err());
        assert!(parse_complex("1..2", 23).is_err());
        assert!(parse_complex("1+2j", 23).is_err());
    }
}
