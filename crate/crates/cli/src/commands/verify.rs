//! `verify`: fuzz the expansion against the full bound suite.

use std::collections::BTreeMap;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use iqcf_core::analysis::verify_expansion;
use iqcf_core::cfrac::{expand, Policy};
use iqcf_core::numerics::{ratio, ComplexValue, QuadComplex, QuadReal, Rational};
use iqcf_core::ring::Ring;

use super::Ctx;
use crate::emit::{parse_b_set, parse_eps_sq, render_json, ring_from_disc, write_out};
use crate::{params, CmdError, CmdResult};

#[derive(Args)]
pub struct VerifyArgs {
    /// Discriminant, negative and 0 or 1 mod 4.
    #[arg(long)]
    disc: i64,
    /// Number of random inputs.
    #[arg(long, default_value_t = 200)]
    runs: u32,
    /// Steps per input.
    #[arg(long, default_value_t = 25)]
    steps: u32,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Denominator set, e.g. `1,2` (defaults to the cached/minimal set).
    #[arg(long)]
    set: Option<String>,
    /// Scale as an exact rational, e.g. `8/9`.
    #[arg(long)]
    eps_sq: Option<String>,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    out: Option<String>,
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=9))
}

/// Random element of `Q(sqrt(d), i)`: generically irrational in both
/// components, so expansions do not terminate and every interior bound
/// gets exercised.
pub fn random_input(rng: &mut ChaCha8Rng, ring: Ring) -> QuadComplex {
    let d = ring.radicand();
    let re = QuadReal::new(d, small_rational(rng), small_rational(rng));
    let mut im = QuadReal::new(d, small_rational(rng), small_rational(rng));
    if im.is_zero() {
        im = QuadReal::new(d, ratio(1, 3), ratio(0, 1));
    }
    QuadComplex::new(re, im)
}

struct NameStats {
    count: u64,
    min_slack: f64,
    failures: u64,
}

pub fn run(ctx: &Ctx, args: &VerifyArgs) -> CmdResult {
    let ring = ring_from_disc(args.disc)?;
    if args.runs == 0 || args.steps == 0 {
        return Err(CmdError::Input("--runs and --steps must be positive".into()));
    }
    let set = match &args.set {
        Some(s) => Some(parse_b_set(ring, s)?),
        None => None,
    };
    let eps_sq = match &args.eps_sq {
        Some(e) => Some(parse_eps_sq(e)?),
        None => None,
    };
    let params = params::resolve(&ctx.cfg.cache_path, ring, set.as_deref(), eps_sq.as_ref())?;

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut by_name: BTreeMap<&'static str, NameStats> = BTreeMap::new();
    let mut failure_samples = Vec::new();
    let mut total_checks: u64 = 0;
    let mut total_failures: u64 = 0;
    let mut terminated_runs: u32 = 0;
    let mut upper_constant = f64::NAN;
    let mut lower_constant = f64::NAN;

    for run_idx in 0..args.runs {
        let z = random_input(&mut rng, ring);
        let expansion = expand(
            ComplexValue::Exact(z.clone()),
            args.steps,
            &params,
            &Policy::GreedyQuality,
        )?;
        if expansion.terminated() {
            terminated_runs += 1;
        }
        let report = verify_expansion(&expansion, &params);
        upper_constant = report.product_upper_constant();
        lower_constant = report.product_lower_constant();
        for check in report.checks() {
            total_checks += 1;
            let entry = by_name.entry(check.name()).or_insert(NameStats {
                count: 0,
                min_slack: f64::INFINITY,
                failures: 0,
            });
            entry.count += 1;
            if check.slack() < entry.min_slack {
                entry.min_slack = check.slack();
            }
            if !check.pass() {
                entry.failures += 1;
                total_failures += 1;
                if failure_samples.len() < 10 {
                    failure_samples.push(json!({
                        "run": run_idx,
                        "z": format!("{}", z),
                        "check": check.name(),
                        "n": check.n(),
                        "n_ref": check.n_ref(),
                        "lhs": check.lhs(),
                        "rhs": check.rhs(),
                    }));
                }
            }
        }
    }

    let names: serde_json::Map<String, serde_json::Value> = by_name
        .iter()
        .map(|(name, s)| {
            (
                name.to_string(),
                json!({
                    "count": s.count,
                    "min_slack": s.min_slack,
                    "failures": s.failures,
                }),
            )
        })
        .collect();
    let doc = json!({
        "disc": args.disc,
        "runs": args.runs,
        "steps": args.steps,
        "seed": args.seed,
        "eps_sq": format!("{}", params.eps_sq()),
        "terminated_runs": terminated_runs,
        "total_checks": total_checks,
        "total_failures": total_failures,
        "product_upper_constant": upper_constant,
        "product_lower_constant": lower_constant,
        "by_name": names,
        "failure_samples": failure_samples,
        "manifest": ctx.manifest.with_seed(args.seed).to_value(),
    });
    write_out(args.out.as_deref(), &render_json(&doc))?;
    if total_failures > 0 {
        return Err(CmdError::Validation(format!(
            "{} bound violations across {} checks",
            total_failures, total_checks
        )));
    }
    Ok(())
}
