use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Subcommand};
use serde_json::{json, Map, Value};

use qmn::thincat::{self, ThinRep};
use qmn::Quiver;

use super::Ctx;
use crate::error::CliResult;
use crate::load::{load_quiver, load_rep, write_json};
use crate::output::Report;

#[derive(Debug, Subcommand)]
pub enum ThinCmd {
    /// Weightwise product of two thin representations.
    Tensor(PairArgs),
    /// Whether a thin representation has a tensor inverse, and the inverse.
    Invertible(SingleArgs),
    /// Solve for a morphism `a -> b` that is 1 on sources and sinks (`--tol` default 1e-9).
    Morphism(PairArgs),
    /// The tensor unit: every arrow carries 1.
    Unit {
        #[arg(long)]
        quiver: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct PairArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long)]
    pub quiver: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SingleArgs {
    pub a: PathBuf,
    #[arg(long)]
    pub quiver: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cmd: &ThinCmd, ctx: Ctx) -> CliResult<Report> {
    match cmd {
        ThinCmd::Tensor(a) => tensor(a),
        ThinCmd::Invertible(a) => invertible(a),
        ThinCmd::Morphism(a) => morphism(a, ctx),
        ThinCmd::Unit { quiver } => {
            let q: Arc<Quiver> = load_quiver(quiver)?;
            Ok(rep_report(&thincat::unit(&q), None)?)
        }
    }
}

fn load_thin(p: &Path, q: Option<&PathBuf>) -> CliResult<ThinRep> {
    Ok(ThinRep::from_rep(&load_rep(p, q)?)?)
}

fn rep_report(r: &ThinRep, out: Option<&PathBuf>) -> CliResult<Report> {
    let spec = r.to_spec(true);
    if let Some(p) = out {
        write_json(p, &spec)?;
    }
    Ok(Report::new(serde_json::to_value(&spec).expect("serializable")))
}

fn tensor(a: &PairArgs) -> CliResult<Report> {
    let x = load_thin(&a.a, a.quiver.as_ref())?;
    let y = load_thin(&a.b, a.quiver.as_ref())?;
    rep_report(&thincat::tensor(&x, &y)?, a.out.as_ref())
}

fn invertible(a: &SingleArgs) -> CliResult<Report> {
    let x = load_thin(&a.a, a.quiver.as_ref())?;
    match thincat::inverse(&x) {
        Some(inv) => {
            let spec = inv.to_spec(true);
            if let Some(p) = &a.out {
                write_json(p, &spec)?;
            }
            Ok(Report::new(json!({"invertible": true, "inverse": spec})))
        }
        None => Ok(Report::new(json!({"invertible": false, "inverse": null}))),
    }
}

fn morphism(a: &PairArgs, ctx: Ctx) -> CliResult<Report> {
    let x = load_thin(&a.a, a.quiver.as_ref())?;
    let y = load_thin(&a.b, a.quiver.as_ref())?;
    let tol = ctx.tol_or(1e-9);
    let q = x.quiver();
    let v = match thincat::solve_morphism(&x, &y, tol)? {
        Some(g) => {
            let check = thincat::check_morphism(&g, &x, &y, tol)?;
            let map: Map<String, Value> = q.vertices().map(|v| (q.name(v).to_string(), json!(g.g[v.0]))).collect();
            json!({
                "exists": true,
                "iso": check.iso,
                "residual": check.residual,
                "g": map,
            })
        }
        None => json!({"exists": false, "iso": false, "g": null}),
    };
    Ok(Report::new(v))
}
