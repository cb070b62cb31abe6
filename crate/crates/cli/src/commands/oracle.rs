//! `oracle`: brute-force best approximations as CSV.

use std::fmt::Write as _;

use clap::Args;

use iqcf_core::analysis::best_approx_oracle;

use super::Ctx;
use crate::emit::{float_string, ring_from_disc, write_out};
use crate::{CmdError, CmdResult};

#[derive(Args)]
pub struct OracleArgs {
    /// Discriminant, negative and 0 or 1 mod 4.
    #[arg(long)]
    disc: i64,
    /// Input, e.g. `-1.26+0.48i`.
    #[arg(long)]
    z: String,
    /// Denominator norm bound: all q with 0 < |q|^2 <= qbound.
    #[arg(long)]
    qbound: u64,
    /// Arithmetic mode.
    #[arg(long, default_value = "exact")]
    mode: String,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    out: Option<String>,
}

pub fn run(ctx: &Ctx, args: &OracleArgs) -> CmdResult {
    let ring = ring_from_disc(args.disc)?;
    let z = super::expand::parse_input(ring, &args.z, &args.mode, ctx.cfg.precision_bits)?;
    let table = best_approx_oracle(&z, ring, args.qbound)?;
    let mut body = String::from("p,q,quality\n");
    for rec in table.records() {
        let _ = writeln!(
            body,
            "{},{},{}",
            rec.p(),
            rec.q(),
            float_string(rec.product())
        );
    }
    write_out(args.out.as_deref(), &ctx.manifest.embed_csv(&body))
        .map_err(CmdError::from)
}
