//! `iqcf`: continued fraction expansions over imaginary quadratic orders.
//!
//! Exit codes: 0 success, 2 validation failure (mismatched reference data,
//! inadmissible sets, violated bounds, rejected scripts), 3 input error
//! (unparsable arguments, invalid discriminants), 4 resource exhaustion
//! (search or vertex budgets, float precision, oracle bounds).

mod commands;
mod config;
mod emit;
mod manifest;
mod params;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use iqcf_core::Error;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_RESOURCE: u8 = 4;

/// Outcome of one subcommand: success, or a structured failure already
/// reported to stderr.
pub enum CmdError {
    /// Computation finished but results failed validation.
    Validation(String),
    /// Arguments or inputs were unusable.
    Input(String),
    /// A budget (search, vertices, precision, oracle) ran out.
    Resource(String),
}

impl CmdError {
    fn exit_code(&self) -> u8 {
        match self {
            CmdError::Validation(_) => EXIT_VALIDATION,
            CmdError::Input(_) => EXIT_INPUT,
            CmdError::Resource(_) => EXIT_RESOURCE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CmdError::Validation(m) | CmdError::Input(m) | CmdError::Resource(m) => m,
        }
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> CmdError {
        match e {
            Error::SearchBoundExceeded { .. }
            | Error::BudgetExceeded { .. }
            | Error::PrecisionExhausted { .. }
            | Error::InsufficientOracleBound { .. } => CmdError::Resource(e.to_string()),
            Error::InvalidScript { .. } => CmdError::Validation(e.to_string()),
            other => CmdError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> CmdError {
        CmdError::Input(format!("io error: {}", e))
    }
}

pub type CmdResult = Result<(), CmdError>;

#[derive(Parser)]
#[command(
    name = "iqcf",
    version,
    about = "Exact continued fractions over imaginary quadratic orders"
)]
struct Cli {
    /// Configuration file (TOML or JSON).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<String>,

    /// Round floating output for humans instead of printing full precision.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide admissibility of a denominator set and compute its minimal scale.
    CheckAdmissible(commands::admissible::CheckArgs),
    /// Search for the minimal admissible denominator set of a discriminant.
    FindMinSet(commands::admissible::FindArgs),
    /// Render one disc covering instance as SVG.
    CoveringSvg(commands::admissible::SvgArgs),
    /// Expand an input into a continued fraction and emit the trail.
    Expand(commands::expand::ExpandArgs),
    /// Enumerate all reachable expansion states of an exact input.
    Explore(commands::explore::ExploreArgs),
    /// Brute-force best approximations up to a denominator norm bound.
    Oracle(commands::oracle::OracleArgs),
    /// Run seeded random expansions and check every per-step bound.
    Verify(commands::verify::VerifyArgs),
    /// Replay the embedded ten-step reference expansion over disc -23.
    Table1(commands::tables::Table1Args),
    /// Recompute minimal admissible sets and compare with the embedded table.
    Table2(commands::tables::Table2Args),
    /// Measure steps (and wall time) needed to reach quality targets.
    Bench(commands::bench::BenchArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Help and version requests are not errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(EXIT_INPUT);
        }
    };

    let cfg = match config::Config::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("iqcf: {}", e.message());
            return ExitCode::from(e.exit_code());
        }
    };
    let ctx = commands::Ctx {
        cfg,
        pretty: cli.pretty,
        manifest: manifest::RunManifest::from_env(),
    };

    let result = match cli.command {
        Command::CheckAdmissible(a) => commands::admissible::check(&ctx, &a),
        Command::FindMinSet(a) => commands::admissible::find(&ctx, &a),
        Command::CoveringSvg(a) => commands::admissible::svg(&ctx, &a),
        Command::Expand(a) => commands::expand::run(&ctx, &a),
        Command::Explore(a) => commands::explore::run(&ctx, &a),
        Command::Oracle(a) => commands::oracle::run(&ctx, &a),
        Command::Verify(a) => commands::verify::run(&ctx, &a),
        Command::Table1(a) => commands::tables::table1(&ctx, &a),
        Command::Table2(a) => commands::tables::table2(&ctx, &a),
        Command::Bench(a) => commands::bench::run(&ctx, &a),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("iqcf: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
