//! `expand`: run the coefficient algorithm on one input and emit the trail.

use clap::Args;
use serde::Deserialize;
use serde_json::{json, Value};

use iqcf_core::cfrac::{expand, render_cf, Coefficient, Expansion, Policy};
use iqcf_core::numerics::{parse_complex, ComplexValue, FloatComplex};
use iqcf_core::ring::Ring;

use super::Ctx;
use crate::emit::{
    element_json, float_json, parse_b_set, parse_eps_sq, render_json, ring_from_disc,
    value_string, write_out,
};
use crate::{params, CmdError, CmdResult};

#[derive(Args)]
pub struct ExpandArgs {
    /// Discriminant, negative and 0 or 1 mod 4.
    #[arg(long)]
    disc: i64,
    /// Input, e.g. `-1.26+0.48i`, `3/4+5/4i`, `1/2+1/3*sqrt(23)i`.
    #[arg(long)]
    z: String,
    /// Maximum number of steps.
    #[arg(long)]
    steps: u32,
    /// Denominator set override, e.g. `1,2`.
    #[arg(long)]
    set: Option<String>,
    /// Scale override as an exact rational, e.g. `8/9`.
    #[arg(long)]
    eps_sq: Option<String>,
    /// `greedy`, `first`, or a path to a JSON coefficient script.
    #[arg(long, default_value = "greedy")]
    policy: String,
    /// Arithmetic mode.
    #[arg(long, default_value = "exact")]
    mode: String,
    /// Float-mode working precision in bits (defaults to the config value).
    #[arg(long)]
    precision: Option<u32>,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    out: Option<String>,
}

#[derive(Deserialize)]
struct ScriptCoord {
    x: i64,
    y: i64,
}

#[derive(Deserialize)]
struct ScriptEntry {
    a: ScriptCoord,
    b: ScriptCoord,
}

/// Load `--policy`: a fixed strategy name or a script file.
fn parse_policy(ring: Ring, text: &str) -> Result<Policy, CmdError> {
    match text {
        "greedy" => Ok(Policy::GreedyQuality),
        "first" => Ok(Policy::FirstFound),
        path => {
            let body = std::fs::read_to_string(path).map_err(|e| {
                CmdError::Input(format!("cannot read script {}: {}", path, e))
            })?;
            let entries: Vec<ScriptEntry> = serde_json::from_str(&body)
                .map_err(|e| CmdError::Input(format!("bad script {}: {}", path, e)))?;
            Ok(Policy::Scripted(
                entries
                    .iter()
                    .map(|e| {
                        Coefficient::new(
                            ring.element(e.a.x, e.a.y),
                            ring.element(e.b.x, e.b.y),
                        )
                    })
                    .collect(),
            ))
        }
    }
}

/// Parse `--z` in the requested mode.
pub fn parse_input(
    ring: Ring,
    text: &str,
    mode: &str,
    precision: u32,
) -> Result<ComplexValue, CmdError> {
    let exact = parse_complex(text, ring.radicand())
        .map_err(|e| CmdError::Input(format!("bad input z: {}", e)))?;
    match mode {
        "exact" => Ok(ComplexValue::Exact(exact)),
        "float" => {
            let (re, im) = exact.to_f64_pair();
            Ok(ComplexValue::Float(FloatComplex::from_f64_pair(
                re, im, precision,
            )))
        }
        other => Err(CmdError::Input(format!(
            "mode must be `exact` or `float`, got {:?}",
            other
        ))),
    }
}

/// Trail rows in the artifact schema.
pub fn trail_json(expansion: &Expansion, pretty: bool) -> Vec<Value> {
    expansion
        .trail()
        .iter()
        .enumerate()
        .map(|(i, step)| {
            json!({
                "n": i + 1,
                "a": element_json(step.coefficient().a()),
                "b": element_json(step.coefficient().b()),
                "p": element_json(step.p()),
                "q": element_json(step.q()),
                "quality": float_json(step.quality(), pretty),
                "z_n": step.z_n().map(value_string),
            })
        })
        .collect()
}

pub fn run(ctx: &Ctx, args: &ExpandArgs) -> CmdResult {
    let ring = ring_from_disc(args.disc)?;
    if args.steps == 0 {
        return Err(CmdError::Input("steps must be at least 1".into()));
    }
    let set = match &args.set {
        Some(s) => Some(parse_b_set(ring, s)?),
        None => None,
    };
    let eps_sq = match &args.eps_sq {
        Some(e) => Some(parse_eps_sq(e)?),
        None => None,
    };
    let params = params::resolve(
        &ctx.cfg.cache_path,
        ring,
        set.as_deref(),
        eps_sq.as_ref(),
    )?;
    let precision = args.precision.unwrap_or(ctx.cfg.precision_bits);
    if precision < 64 {
        return Err(CmdError::Input(format!(
            "precision must be at least 64 bits, got {}",
            precision
        )));
    }
    let z = parse_input(ring, &args.z, &args.mode, precision)?;
    let policy = parse_policy(ring, &args.policy)?;
    let expansion = expand(z, args.steps, &params, &policy)?;

    let (p, q) = expansion.convergent();
    let doc = json!({
        "disc": args.disc,
        "z": args.z,
        "mode": args.mode,
        "policy": args.policy,
        "b_set": params.b_set().iter().map(element_json).collect::<Vec<_>>(),
        "eps_sq": crate::emit::rational_string(params.eps_sq()),
        "steps": expansion.trail().len(),
        "terminated": expansion.terminated(),
        "trail": trail_json(&expansion, ctx.pretty()),
        "convergent": { "p": element_json(p), "q": element_json(q) },
        "rendered": render_cf(&expansion),
        "manifest": ctx.manifest.to_value(),
    });
    write_out(args.out.as_deref(), &render_json(&doc))
}
