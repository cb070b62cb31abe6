//! `table1` and `table2`: replay the reference worked example and recompute
//! the minimal-set reference table, reporting any disagreement.

use std::time::Instant;

use clap::Args;
use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::json;

use iqcf_core::cfrac::{expand, Coefficient, Policy};
use iqcf_core::covering::{check_admissible, find_minimal_admissible_set, CandidateRule};
use iqcf_core::numerics::parse_complex;
use iqcf_core::ring::Ring;

use super::Ctx;
use crate::emit::{element_json, render_json, ring_from_disc, write_out};
use crate::{CmdError, CmdResult};

const REFERENCE_EXPANSION: &str = include_str!("../../data/reference_expansion_disc23.json");
const MINIMAL_SETS: &str = include_str!("../../data/minimal_sets_reference.json");

#[derive(Deserialize)]
struct RefCoord {
    x: i64,
    y: i64,
}

#[derive(Deserialize)]
struct RefRow {
    n: u32,
    z_prev: String,
    a: RefCoord,
    b: RefCoord,
    p: RefCoord,
    q: RefCoord,
    quality: String,
}

#[derive(Deserialize)]
struct RefExpansion {
    disc: i64,
    z: String,
    b_set: Vec<i64>,
    eps_sq: String,
    q9_norm_sq: i64,
    q10_norm_sq: i64,
    rows: Vec<RefRow>,
}

#[derive(Deserialize)]
struct MinRow {
    abs_disc: i64,
    b_set: Vec<i64>,
    eps_sq: [i64; 4],
}

#[derive(Deserialize)]
struct MinTable {
    rows: Vec<MinRow>,
}

/// Width of the last printed decimal place: `"0.882"` gives `1e-3`.
fn printed_ulp(text: &str) -> f64 {
    match text.find('.') {
        Some(dot) => 10f64.powi(-((text.len() - dot - 1) as i32)),
        None => 1.0,
    }
}

/// Split `"-1.26+0.48i"` into its two printed components.
fn split_complex(text: &str) -> Result<(&str, &str), CmdError> {
    let body = text
        .strip_suffix('i')
        .ok_or_else(|| CmdError::Input(format!("bad complex literal {:?}", text)))?;
    for (i, c) in body.char_indices().skip(1) {
        if (c == '+' || c == '-') && !body[..i].ends_with(['e', 'E']) {
            return Ok((&body[..i], &body[i..]));
        }
    }
    Err(CmdError::Input(format!("bad complex literal {:?}", text)))
}

fn parse_printed(text: &str) -> Result<f64, CmdError> {
    text.parse::<f64>()
        .map_err(|_| CmdError::Input(format!("bad printed number {:?}", text)))
}

#[derive(Args)]
pub struct Table1Args {
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    out: Option<String>,
}

pub fn table1(ctx: &Ctx, args: &Table1Args) -> CmdResult {
    let reference: RefExpansion = serde_json::from_str(REFERENCE_EXPANSION)
        .expect("embedded reference expansion parses");
    let ring = ring_from_disc(reference.disc)?;
    let z = parse_complex(&reference.z, ring.radicand())
        .map_err(|e| CmdError::Input(format!("bad reference input: {}", e)))?;
    let b_set: Vec<_> = reference.b_set.iter().map(|&k| ring.element(k, 0)).collect();
    let eps_sq = crate::emit::parse_eps_sq(&reference.eps_sq)?;
    let params = iqcf_core::covering::AdmissibleParams::new(b_set, eps_sq);
    let script: Vec<Coefficient> = reference
        .rows
        .iter()
        .map(|r| Coefficient::new(ring.element(r.a.x, r.a.y), ring.element(r.b.x, r.b.y)))
        .collect();
    let expansion = expand(
        iqcf_core::numerics::ComplexValue::Exact(z),
        reference.rows.len() as u32,
        &params,
        &Policy::Scripted(script),
    )?;

    let mut all_match = true;
    let mut rows = Vec::new();
    for (i, row) in reference.rows.iter().enumerate() {
        let step = &expansion.trail()[i];
        let exact_match = step.coefficient().a() == &ring.element(row.a.x, row.a.y)
            && step.coefficient().b() == &ring.element(row.b.x, row.b.y)
            && step.p() == &ring.element(row.p.x, row.p.y)
            && step.q() == &ring.element(row.q.x, row.q.y);

        let printed_q = parse_printed(&row.quality)?;
        let quality_match = (step.quality() - printed_q).abs() <= printed_ulp(&row.quality);

        let (re_s, im_s) = split_complex(&row.z_prev)?;
        let (re_p, im_p) = (parse_printed(re_s)?, parse_printed(im_s)?);
        let (re_c, im_c) = if i == 0 {
            expansion.state().z().to_f64_pair()
        } else {
            expansion.trail()[i - 1]
                .z_n()
                .map(|v| v.to_f64_pair())
                .unwrap_or((f64::NAN, f64::NAN))
        };
        let z_prev_match = (re_c - re_p).abs() <= printed_ulp(re_s)
            && (im_c - im_p).abs() <= printed_ulp(im_s);

        all_match &= exact_match && quality_match && z_prev_match;
        rows.push(json!({
            "n": row.n,
            "a": element_json(step.coefficient().a()),
            "b": element_json(step.coefficient().b()),
            "p": element_json(step.p()),
            "q": element_json(step.q()),
            "quality": float_json(step.quality(), ctx.pretty()),
            "quality_printed": row.quality,
            "quality_match": quality_match,
            "z_prev": format!("{:.2}{:+.2}i", re_c, im_c),
            "z_prev_printed": row.z_prev,
            "z_prev_match": z_prev_match,
            "exact_match": exact_match,
        }));
    }

    let q9 = expansion.trail()[8].q().norm();
    let q10 = expansion.trail()[9].q().norm();
    let norms_match =
        q9 == BigInt::from(reference.q9_norm_sq) && q10 == BigInt::from(reference.q10_norm_sq);
    all_match &= norms_match;

    let doc = json!({
        "disc": reference.disc,
        "z": reference.z,
        "eps_sq": reference.eps_sq,
        "rows": rows,
        "q9_norm_sq": {"expected": reference.q9_norm_sq, "computed": q9.to_string()},
        "q10_norm_sq": {"expected": reference.q10_norm_sq, "computed": q10.to_string()},
        "norms_match": norms_match,
        "all_match": all_match,
        "manifest": ctx.manifest.to_value(),
    });
    write_out(args.out.as_deref(), &render_json(&doc))?;
    if !all_match {
        return Err(CmdError::Validation(
            "replayed expansion disagrees with the reference table".into(),
        ));
    }
    Ok(())
}

#[derive(Args)]
pub struct Table2Args {
    /// Smallest |discriminant| to include.
    #[arg(long, default_value_t = 3)]
    min_abs: i64,
    /// Largest |discriminant| to include.
    #[arg(long, default_value_t = 48)]
    max_abs: i64,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    out: Option<String>,
}

fn closed_form_string(c: &[i64; 4]) -> String {
    if c[1] == 0 {
        format!("{}/{}", c[0], c[3])
    } else {
        format!("({} - {}*sqrt({}))/{}", c[0], c[1], c[2], c[3])
    }
}

fn closed_form_value(c: &[i64; 4]) -> f64 {
    (c[0] as f64 - c[1] as f64 * (c[2] as f64).sqrt()) / c[3] as f64
}

pub fn table2(ctx: &Ctx, args: &Table2Args) -> CmdResult {
    let reference: MinTable =
        serde_json::from_str(MINIMAL_SETS).expect("embedded minimal-set table parses");

    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    for abs in args.min_abs.max(3)..=args.max_abs {
        if abs % 4 != 0 && abs % 4 != 3 {
            continue;
        }
        let started = Instant::now();
        let ring = Ring::from_discriminant(-abs)?;
        let params = find_minimal_admissible_set(ring, &CandidateRule::default())?;
        let report = check_admissible(ring, params.b_set())?;
        let elapsed_ms = started.elapsed().as_millis() as u64;

        let computed_set: Vec<String> =
            params.b_set().iter().map(|b| format!("{}", b)).collect();
        let expected = reference.rows.iter().find(|r| r.abs_disc == abs);
        let (set_match, eps_match, expected_json) = match expected {
            Some(exp) => {
                let want: Vec<_> = exp.b_set.iter().map(|&k| ring.element(k, 0)).collect();
                let set_match = params.b_set() == want.as_slice();
                let expect_val = closed_form_value(&exp.eps_sq);
                let eps_match = (report.eps_sq() - expect_val).abs() <= ctx.cfg.tolerance;
                let j = json!({
                    "b_set": exp.b_set,
                    "eps_sq": float_json(expect_val, ctx.pretty()),
                    "closed_form": closed_form_string(&exp.eps_sq),
                });
                (set_match, eps_match, Some(j))
            }
            None => (true, true, None),
        };
        if !(set_match && eps_match) {
            mismatches.push(abs);
        }
        rows.push(json!({
            "abs_disc": abs,
            "b_set": computed_set,
            "eps_sq": report.eps_sq(),
            "eps_sq_lo": format!("{}", report.eps_sq_lo()),
            "eps_sq_hi": format!("{}", report.eps_sq_hi()),
            "mu_sq": format!("{}", params.mu_sq()),
            "expected": expected_json,
            "set_match": set_match,
            "eps_match": eps_match,
            "elapsed_ms": elapsed_ms,
        }));
    }

    let doc = json!({
        "min_abs": args.min_abs,
        "max_abs": args.max_abs,
        "tolerance": ctx.cfg.tolerance,
        "rows": rows,
        "mismatches": mismatches,
        "all_match": mismatches.is_empty(),
        "manifest": ctx.manifest.to_value(),
    });
    write_out(args.out.as_deref(), &render_json(&doc))?;
    if !mismatches.is_empty() {
        return Err(CmdError::Validation(format!(
            "computed table disagrees with the reference at |disc| {:?}",
            mismatches
        )));
    }
    Ok(())
}
