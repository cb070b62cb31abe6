//! `check-admissible`, `find-min-set`, and `covering-svg`.

use clap::Args;
use num_traits::ToPrimitive;
use serde_json::json;

use iqcf_core::covering::{
    build_covering_instance, check_admissible, covering_svg, find_minimal_admissible_set,
    CandidateRule,
};
use iqcf_core::ring::{enumerate_reduced_ideals_meeting, IdealLattice};

use super::Ctx;
use crate::emit::{
    element_json, float_json, ideal_json, parse_b_set, rational_string, render_json,
    ring_from_disc, write_out,
};
use crate::{params, CmdError, CmdResult};

#[derive(Args)]
pub struct CheckArgs {
    /// Discriminant, negative and 0 or 1 mod 4.
    #[arg(long)]
    disc: i64,
    /// Denominator set, e.g. `1,2` or `1,2,(0,1)`.
    #[arg(long)]
    set: String,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    out: Option<String>,
}

pub fn check(ctx: &Ctx, args: &CheckArgs) -> CmdResult {
    let ring = ring_from_disc(args.disc)?;
    let bs = parse_b_set(ring, &args.set)?;
    let report = check_admissible(ring, &bs)?;
    let ideals = enumerate_reduced_ideals_meeting(ring, &bs)?;
    let doc = json!({
        "disc": args.disc,
        "set": bs.iter().map(element_json).collect::<Vec<_>>(),
        "ideals": ideals.iter().map(ideal_json).collect::<Vec<_>>(),
        "admissible": report.admissible(),
        "eps_sq": float_json(report.eps_sq(), ctx.pretty()),
        "eps_sq_lo": float_json(report.eps_sq_lo().to_f64().unwrap_or(f64::NAN), ctx.pretty()),
        "eps_sq_hi": float_json(report.eps_sq_hi().to_f64().unwrap_or(f64::NAN), ctx.pretty()),
        "eps_sq_exact_hi": rational_string(report.eps_sq_hi()),
        "manifest": ctx.manifest.to_value(),
    });
    write_out(args.out.as_deref(), &render_json(&doc))
}

#[derive(Args)]
pub struct FindArgs {
    /// Discriminant, negative and 0 or 1 mod 4.
    #[arg(long)]
    disc: i64,
    /// Candidate rule: `prefix` searches {1}, {1,2}, ... ; `subsets` searches
    /// all subsets of the norm ball.
    #[arg(long, default_value = "prefix")]
    rule: String,
    /// Largest integer (prefix rule) or norm bound (subsets rule) to try.
    #[arg(long, default_value_t = 24)]
    max: u64,
    /// Skip writing the result into the parameter cache.
    #[arg(long)]
    no_cache: bool,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    out: Option<String>,
}

pub fn find(ctx: &Ctx, args: &FindArgs) -> CmdResult {
    let ring = ring_from_disc(args.disc)?;
    let rule = match args.rule.as_str() {
        "prefix" => CandidateRule::IntegerPrefix { max_m: args.max },
        "subsets" => CandidateRule::Subsets {
            max_mu_sq: args.max,
            max_count: 100_000,
        },
        other => {
            return Err(CmdError::Input(format!(
                "rule must be `prefix` or `subsets`, got {:?}",
                other
            )))
        }
    };
    let params_found = find_minimal_admissible_set(ring, &rule)?;
    if !args.no_cache {
        params::remember(&ctx.cfg.cache_path, ring, &params_found);
    }
    let doc = json!({
        "disc": args.disc,
        "b_set": params_found.b_set().iter().map(element_json).collect::<Vec<_>>(),
        "eps_sq": float_json(
            params_found.eps_sq().to_f64().unwrap_or(f64::NAN),
            ctx.pretty(),
        ),
        "eps_sq_exact": rational_string(params_found.eps_sq()),
        "mu_sq": rational_string(params_found.mu_sq()),
        "manifest": ctx.manifest.to_value(),
    });
    write_out(args.out.as_deref(), &render_json(&doc))
}

#[derive(Args)]
pub struct SvgArgs {
    /// Discriminant, negative and 0 or 1 mod 4.
    #[arg(long)]
    disc: i64,
    /// Denominator set, e.g. `1,2`.
    #[arg(long)]
    set: String,
    /// Index into the reduced ideals meeting the set (0 = the full ring).
    #[arg(long, default_value_t = 0)]
    ideal: usize,
    /// Disc scale factor eps in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Marked points, e.g. `0.25,0.5;1.0,0.0`.
    #[arg(long)]
    mark: Option<String>,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    out: Option<String>,
}

pub fn svg(ctx: &Ctx, args: &SvgArgs) -> CmdResult {
    let ring = ring_from_disc(args.disc)?;
    let bs = parse_b_set(ring, &args.set)?;
    if !(args.scale > 0.0 && args.scale <= 1.0) {
        return Err(CmdError::Input(format!(
            "scale must lie in (0, 1], got {}",
            args.scale
        )));
    }
    let ideals = enumerate_reduced_ideals_meeting(ring, &bs)?;
    let ideal: &IdealLattice = ideals.get(args.ideal).ok_or_else(|| {
        CmdError::Input(format!(
            "ideal index {} out of range; {} reduced ideals meet this set",
            args.ideal,
            ideals.len()
        ))
    })?;
    let marks = parse_marks(args.mark.as_deref())?;
    let inst = build_covering_instance(ring, &bs, ideal)?;
    let svg = covering_svg(&inst, args.scale, &marks);
    write_out(args.out.as_deref(), &ctx.manifest.embed_svg(&svg))
}

fn parse_marks(text: Option<&str>) -> Result<Vec<(f64, f64)>, CmdError> {
    let Some(text) = text else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for part in text.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (x, y) = part
            .split_once(',')
            .ok_or_else(|| CmdError::Input(format!("bad marked point {:?}", part)))?;
        let x: f64 = x
            .trim()
            .parse()
            .map_err(|_| CmdError::Input(format!("bad marked point {:?}", part)))?;
        let y: f64 = y
            .trim()
            .parse()
            .map_err(|_| CmdError::Input(format!("bad marked point {:?}", part)))?;
        out.push((x, y));
    }
    Ok(out)
}
