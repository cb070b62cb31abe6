//! Serialization helpers shared by all subcommands: ring elements, ideals
//! and rationals to JSON, float formatting, argument parsing for sets and
//! complex inputs, and artifact writing.

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use iqcf_core::numerics::{format_f64, parse_rational, ComplexValue, Rational};
use iqcf_core::ring::{IdealLattice, Ring, RingElement};

use crate::CmdError;

/// `{ "x": int, "y": int }`; coordinates exceeding 64 bits are emitted as
/// decimal strings.
pub fn element_json(e: &RingElement) -> Value {
    let coord = |b: &num_bigint::BigInt| -> Value {
        match b.to_i64() {
            Some(v) => json!(v),
            None => json!(b.to_string()),
        }
    };
    json!({ "x": coord(e.x()), "y": coord(e.y()) })
}

pub fn rational_string(r: &Rational) -> String {
    format!("{}", r)
}

/// `{ "scale": "p/q", "a0": int, "b0": int, "c0": int, "norm": "p/q" }`.
pub fn ideal_json(l: &IdealLattice) -> Value {
    let coord = |b: &num_bigint::BigInt| -> Value {
        match b.to_i64() {
            Some(v) => json!(v),
            None => json!(b.to_string()),
        }
    };
    json!({
        "scale": rational_string(l.scale()),
        "a0": coord(l.a0()),
        "b0": coord(l.b0()),
        "c0": coord(l.c0()),
        "norm": rational_string(&l.norm()),
    })
}

/// Float to JSON: full round-trip precision by default, 6 significant
/// digits under `--pretty`.
pub fn float_json(v: f64, pretty: bool) -> Value {
    if pretty {
        let rounded: f64 = format!("{:.6e}", v).parse().unwrap_or(v);
        json!(rounded)
    } else {
        json!(v)
    }
}

/// Float to text at full precision (17 significant digits).
pub fn float_string(v: f64) -> String {
    format_f64(v)
}

/// One exact-or-float value as a display string.
pub fn value_string(v: &ComplexValue) -> String {
    match v {
        ComplexValue::Exact(q) => format!("{}", q),
        ComplexValue::Float(f) => {
            let (re, im) = f.to_f64_pair();
            if im >= 0.0 {
                format!("{}+{}i", format_f64(re), format_f64(im))
            } else {
                format!("{}{}i", format_f64(re), format_f64(im))
            }
        }
    }
}

/// Parse `--disc` into a ring.
pub fn ring_from_disc(disc: i64) -> Result<Ring, CmdError> {
    Ring::from_discriminant(disc).map_err(CmdError::from)
}

/// Parse a denominator set: comma-separated integers or `(x,y)` pairs, e.g.
/// `1,2` or `1,2,(0,1)`.
pub fn parse_b_set(ring: Ring, text: &str) -> Result<Vec<RingElement>, CmdError> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut token = String::new();
    let mut tokens = Vec::new();
    for c in text.chars() {
        match c {
            '(' => {
                depth += 1;
                token.push(c);
            }
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| CmdError::Input(format!("unbalanced parens in set {:?}", text)))?;
                token.push(c);
            }
            ',' if depth == 0 => {
                tokens.push(std::mem::take(&mut token));
            }
            c if c.is_whitespace() => {}
            _ => token.push(c),
        }
    }
    if !token.is_empty() {
        tokens.push(token);
    }
    if tokens.is_empty() {
        return Err(CmdError::Input("denominator set is empty".into()));
    }
    for t in tokens {
        if let Some(inner) = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
            let parts: Vec<&str> = inner.split(',').collect();
            if parts.len() != 2 {
                return Err(CmdError::Input(format!("bad set element {:?}", t)));
            }
            let x: i64 = parts[0]
                .parse()
                .map_err(|_| CmdError::Input(format!("bad set element {:?}", t)))?;
            let y: i64 = parts[1]
                .parse()
                .map_err(|_| CmdError::Input(format!("bad set element {:?}", t)))?;
            out.push(ring.element(x, y));
        } else {
            let v: i64 = t
                .parse()
                .map_err(|_| CmdError::Input(format!("bad set element {:?}", t)))?;
            out.push(ring.from_int(v));
        }
    }
    Ok(out)
}

/// Parse `--eps-sq p/q` with the open-interval check done ring-side later.
pub fn parse_eps_sq(text: &str) -> Result<Rational, CmdError> {
    parse_rational(text).map_err(|e| CmdError::Input(format!("bad eps-sq: {}", e)))
}

/// Render a JSON value, compact and with object keys in insertion order.
pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

/// Write an artifact to a file or stdout.
pub fn write_out(path: Option<&str>, content: &str) -> Result<(), CmdError> {
    match path {
        Some(p) => {
            std::fs::write(p, content)
                .map_err(|e| CmdError::Input(format!("cannot write {}: {}", p, e)))?;
        }
        None => {
            print!("{}", content);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_parsing_handles_pairs_and_integers() {
        let r = Ring::from_discriminant(-23).unwrap();
        let set = parse_b_set(r, "1,2,(0,1)").unwrap();
        assert_eq!(set.len(), 3);
        assert_eq!(set[2], r.element(0, 1));
        assert!(parse_b_set(r, "").is_err());
        assert!(parse_b_set(r, "(1,2,3)").is_err());
        assert!(parse_b_set(r, "x").is_err());
    }

    #[test]
    fn floats_render_with_full_precision() {
        let s = float_string(0.8819171036881969);
        assert!(s.starts_with("8.819171036881969"));
    }
}
