//! `bench`: measure steps and wall time needed to reach quality `1/delta`
//! for `delta = 2, 4, ..., 2^k`, against the worst-case step bound.

use std::fmt::Write as _;
use std::time::Instant;

use clap::Args;
use num_traits::ToPrimitive;

use iqcf_core::cfrac::{expand, Policy};
use iqcf_core::numerics::{parse_complex, ComplexValue};

use super::Ctx;
use crate::emit::{parse_b_set, parse_eps_sq, ring_from_disc, write_out};
use crate::{params, CmdError, CmdResult};

#[derive(Args)]
pub struct BenchArgs {
    /// Discriminant, negative and 0 or 1 mod 4.
    #[arg(long, default_value_t = -23)]
    disc: i64,
    /// Input; the default is irrational over the field, so the run cannot
    /// terminate early.
    #[arg(long, default_value = "1/3*sqrt(23)+2/7i")]
    z: String,
    /// Largest quality target as a power of two: delta runs to 2^k.
    #[arg(long, default_value_t = 20)]
    max_log2: u32,
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

pub fn run(ctx: &Ctx, args: &BenchArgs) -> CmdResult {
    let ring = ring_from_disc(args.disc)?;
    if args.max_log2 == 0 || args.max_log2 > 40 {
        return Err(CmdError::Input("--max-log2 must be in 1..=40".into()));
    }
    let z = parse_complex(&args.z, ring.radicand())
        .map_err(|e| CmdError::Input(format!("bad input z: {}", e)))?;
    let set = match &args.set {
        Some(s) => Some(parse_b_set(ring, s)?),
        None => None,
    };
    let eps_sq = match &args.eps_sq {
        Some(e) => Some(parse_eps_sq(e)?),
        None => None,
    };
    let params = params::resolve(&ctx.cfg.cache_path, ring, set.as_deref(), eps_sq.as_ref())?;

    // steps(delta) <= ceil(log_{1/eps} delta); log(1/eps) = -log(eps^2)/2.
    let log_inv_eps = -0.5 * params.eps_sq().to_f64().unwrap_or(f64::NAN).ln();
    let bound = |k: u32| ((k as f64) * std::f64::consts::LN_2 / log_inv_eps).ceil() as u32;

    let max_steps = bound(args.max_log2) + 2;
    let full = expand(
        ComplexValue::Exact(z.clone()),
        max_steps,
        &params,
        &Policy::GreedyQuality,
    )?;

    let mut body = String::from("delta,steps,wall_ms,bound\n");
    let mut exceeded = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 1..=args.max_log2 {
        let target = 2f64.powi(-(k as i32));
        let steps = match full
            .trail()
            .iter()
            .position(|s| s.quality() <= target)
        {
            Some(i) => (i + 1) as u32,
            None => {
                exceeded.push(k);
                continue;
            }
        };
        let started = Instant::now();
        let timed = expand(
            ComplexValue::Exact(z.clone()),
            steps,
            &params,
            &Policy::GreedyQuality,
        )?;
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
        debug_assert_eq!(timed.trail().len(), full.trail()[..steps as usize].len());
        let b = bound(k);
        if steps > b {
            exceeded.push(k);
        }
        xs.push((k as f64) * std::f64::consts::LN_2);
        ys.push(steps as f64);
        let _ = writeln!(body, "{},{},{:.3},{}", 1u64 << k, steps, wall_ms, b);
    }

    // Least-squares slope of steps against log(delta).
    let m = xs.len() as f64;
    let (sx, sy): (f64, f64) = (xs.iter().sum(), ys.iter().sum());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let _ = writeln!(
        body,
        "# slope: {:.6} expected: {:.6} ratio: {:.4}",
        slope,
        1.0 / log_inv_eps,
        slope * log_inv_eps
    );

    write_out(args.out.as_deref(), &ctx.manifest.embed_csv(&body))?;
    if !exceeded.is_empty() {
        return Err(CmdError::Validation(format!(
            "step bound exceeded at log2(delta) {:?}",
            exceeded
        )));
    }
    Ok(())
}
