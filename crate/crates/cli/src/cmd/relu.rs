use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Subcommand};
use serde_json::{json, Map, Value};

use qmn::relu::{self, Level};
use qmn::{split, DoubleFramedTriple, FramedQuiver};

use super::Ctx;
use crate::error::{CliError, CliResult};
use crate::load::{write_json, RepInput};
use crate::output::{matrix, Report};

#[derive(Debug, Subcommand)]
pub enum ReluCmd {
    /// Momentum `μ_i` at every hidden vertex.
    Momentum(RepInput),
    /// Positive rescaling onto the level set `μ = 0` or `μ = 1` (`--tol` default 1e-8).
    Balance(BalanceArgs),
}

#[derive(Debug, Args)]
pub struct BalanceArgs {
    #[command(flatten)]
    pub input: RepInput,
    #[arg(long, default_value = "0")]
    pub target: String,
    /// Write the balanced representation here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cmd: &ReluCmd, ctx: Ctx) -> CliResult<Report> {
    match cmd {
        ReluCmd::Momentum(a) => momentum(a),
        ReluCmd::Balance(a) => balance(a, ctx),
    }
}

fn triple(input: &RepInput) -> CliResult<DoubleFramedTriple> {
    let rep = input.rep()?;
    let frame = Arc::new(FramedQuiver::new(rep.quiver().clone(), rep.dims().clone())?);
    Ok(split(&frame, &rep)?)
}

pub fn momentum_json(t: &DoubleFramedTriple) -> Value {
    let fr = &t.frame;
    let mu = relu::momentum(t);
    let thin = fr.hidden_dims().iter().all(|&d| d == 1);
    let map: Map<String, Value> = mu
        .iter()
        .enumerate()
        .map(|(i, m)| (fr.hidden_name(i).to_string(), if thin { json!(m[(0, 0)]) } else { matrix(m) }))
        .collect();
    Value::Object(map)
}

fn momentum(a: &RepInput) -> CliResult<Report> {
    let t = triple(a)?;
    Ok(Report::new(json!({"momentum": momentum_json(&t)})))
}

fn balance(a: &BalanceArgs, ctx: Ctx) -> CliResult<Report> {
    let level = Level::parse(&a.target).map_err(|e| CliError::Usage(e.to_string()))?;
    let tol = ctx.tol_or(1e-8);
    let t = triple(&a.input)?;
    let b = relu::balance(&t, level, tol)?;
    let spec = b.triple.join().to_spec(true);
    if let Some(p) = &a.out {
        write_json(p, &spec)?;
    }
    let fr = &t.frame;
    let gauge: Map<String, Value> =
        b.gauge.iter().enumerate().map(|(i, g)| (fr.hidden_name(i).to_string(), json!(g))).collect();
    Ok(Report::new(json!({
        "target": a.target,
        "sweeps": b.sweeps,
        "gauge": gauge,
        "momentum": momentum_json(&b.triple),
        "balanced": spec,
    })))
}
