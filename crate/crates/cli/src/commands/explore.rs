//! `explore`: close over all reachable expansion states of an exact input.

use std::fmt::Write as _;

use clap::Args;
use serde_json::json;

use iqcf_core::analysis::{
    detect_periodicity, explore_states_with_budget, ExploreMode, StateGraph,
    DEFAULT_VERTEX_BUDGET,
};
use iqcf_core::numerics::parse_complex;

use super::Ctx;
use crate::emit::{
    element_json, parse_b_set, parse_eps_sq, render_json, ring_from_disc, write_out,
};
use crate::{params, CmdError, CmdResult};

#[derive(Args)]
pub struct ExploreArgs {
    /// Discriminant, negative and 0 or 1 mod 4.
    #[arg(long)]
    disc: i64,
    /// Exact input, e.g. `3/4+5/4i`.
    #[arg(long)]
    z: String,
    /// Use the open-disc rule `|b z - a| < |b'|` instead of a fixed scale.
    #[arg(long)]
    open: bool,
    /// Denominator set, e.g. `1,2` (defaults to the cached/minimal set).
    #[arg(long)]
    set: Option<String>,
    /// Scale as an exact rational, e.g. `8/9` (closed-disc rule).
    #[arg(long)]
    eps_sq: Option<String>,
    /// Vertex budget.
    #[arg(long, default_value_t = DEFAULT_VERTEX_BUDGET)]
    budget: usize,
    /// Output file for the graph JSON (stdout when omitted).
    #[arg(short, long)]
    out: Option<String>,
    /// Also emit a DOT rendering to this path.
    #[arg(long)]
    dot: Option<String>,
}

fn graph_dot(graph: &StateGraph) -> String {
    let mut s = String::from("digraph states {\n  rankdir=LR;\n");
    for (i, v) in graph.vertices().iter().enumerate() {
        let label = match v.z() {
            Some(z) => format!("{}", z),
            None => "end".to_string(),
        };
        let shape = if v.is_terminal() {
            " shape=doublecircle"
        } else {
            ""
        };
        let _ = writeln!(s, "  {} [label=\"{}\"{}];", i, label, shape);
    }
    for e in graph.edges() {
        let _ = writeln!(
            s,
            "  {} -> {} [label=\"{}\"];",
            e.from(),
            e.to(),
            e.coefficient()
        );
    }
    s.push_str("}\n");
    s
}

pub fn run(ctx: &Ctx, args: &ExploreArgs) -> CmdResult {
    let ring = ring_from_disc(args.disc)?;
    let z = parse_complex(&args.z, ring.radicand())
        .map_err(|e| CmdError::Input(format!("bad input z: {}", e)))?;
    if args.open && args.eps_sq.is_some() {
        return Err(CmdError::Input(
            "--open and --eps-sq are mutually exclusive".into(),
        ));
    }
    let set = match &args.set {
        Some(s) => Some(parse_b_set(ring, s)?),
        None => None,
    };
    let mode = if args.open {
        let bs = set.ok_or_else(|| {
            CmdError::Input("--open requires an explicit --set".into())
        })?;
        ExploreMode::Open(bs)
    } else {
        let eps_sq = match &args.eps_sq {
            Some(e) => Some(parse_eps_sq(e)?),
            None => None,
        };
        ExploreMode::Eps(params::resolve(
            &ctx.cfg.cache_path,
            ring,
            set.as_deref(),
            eps_sq.as_ref(),
        )?)
    };
    let graph = explore_states_with_budget(&z, ring, &mode, args.budget)?;
    let periodicity = if graph.closed() {
        detect_periodicity(&graph)?
    } else {
        None
    };

    let vertices: Vec<_> = graph
        .vertices()
        .iter()
        .map(|v| {
            json!({
                "z": v.z().map(|q| format!("{}", q)),
                "b_prev": element_json(v.b_prev()),
                "terminal": v.is_terminal(),
            })
        })
        .collect();
    let edges: Vec<_> = graph
        .edges()
        .iter()
        .map(|e| {
            json!({
                "from": e.from(),
                "a": element_json(e.coefficient().a()),
                "b": element_json(e.coefficient().b()),
                "to": e.to(),
            })
        })
        .collect();
    let period_json = periodicity.as_ref().map(|p| {
        json!({
            "preperiod_len": p.preperiod_len(),
            "period_len": p.period_len(),
            "prefix": p.prefix().iter().map(|c| json!({
                "a": element_json(c.a()), "b": element_json(c.b()),
            })).collect::<Vec<_>>(),
            "cycle": p.cycle().iter().map(|c| json!({
                "a": element_json(c.a()), "b": element_json(c.b()),
            })).collect::<Vec<_>>(),
        })
    });
    let doc = json!({
        "disc": args.disc,
        "z": args.z,
        "mode": if args.open { "open" } else { "eps" },
        "root": graph.root(),
        "closed": graph.closed(),
        "vertices": vertices,
        "edges": edges,
        "periodicity": period_json,
        "manifest": ctx.manifest.to_value(),
    });
    write_out(args.out.as_deref(), &render_json(&doc))?;
    if let Some(dot_path) = &args.dot {
        write_out(Some(dot_path), &ctx.manifest.embed_dot(&graph_dot(&graph)))?;
    }
    Ok(())
}
