use std::sync::Arc;

use clap::{Args, Subcommand};
use serde_json::{json, Map, Value};

use qmn::moduli::{self, ModuliLayout};
use qmn::{split, ModuliPoint};

use super::Ctx;
use crate::error::CliResult;
use crate::load::RepInput;
use crate::output::{matrix, matrix_table, Report, Table};

#[derive(Debug, Subcommand)]
pub enum ModuliCmd {
    /// Invariant coordinates `h_j V_ω f_i`, one block per hidden path.
    Coords(CoordsArgs),
    /// Rank of the vertex block at every hidden vertex (`--tol`: relative singular-value cutoff, default 1e-8).
    Rank(RepInput),
    /// Dimension of the moduli space for a dimension vector.
    Dim(RepInput),
    /// Whether the moduli space contains a simple point.
    SimpleExists(RepInput),
}

#[derive(Debug, Args)]
pub struct CoordsArgs {
    #[command(flatten)]
    pub input: RepInput,
    /// Emit the assembled matrix `⊕U_i -> ⊕W_j` instead of per-path blocks.
    #[arg(long)]
    pub assembled: bool,
}

pub fn run(cmd: &ModuliCmd, ctx: Ctx) -> CliResult<Report> {
    match cmd {
        ModuliCmd::Coords(a) => coords(a),
        ModuliCmd::Rank(a) => rank(a, ctx),
        ModuliCmd::Dim(a) => dim(a),
        ModuliCmd::SimpleExists(a) => simple_exists(a),
    }
}

fn point(input: &RepInput) -> CliResult<ModuliPoint> {
    let frame = input.frame()?;
    let rep = input.rep()?;
    let layout = Arc::new(ModuliLayout::new(frame.clone())?);
    Ok(layout.project(&split(&frame, &rep)?)?)
}

pub fn blocks_json(m: &ModuliPoint) -> Value {
    let q = &m.frame().quiver;
    let paths: Vec<Value> = m
        .layout
        .paths
        .iter()
        .zip(&m.blocks)
        .map(|(p, b)| {
            json!({
                "path": p.label(q),
                "from": q.name(p.start),
                "to": q.name(p.end),
                "block": matrix(b),
            })
        })
        .collect();
    let bypass: Vec<Value> = m
        .frame()
        .framing
        .bypass
        .iter()
        .zip(&m.bypass)
        .map(|(&a, b)| json!({"arrow": q.arrow(a).id, "block": matrix(b)}))
        .collect();
    json!({"paths": paths, "bypass": bypass})
}

fn coords(a: &CoordsArgs) -> CliResult<Report> {
    let m = point(&a.input)?;
    if a.assembled {
        let asm = m.assembled();
        return Ok(Report::new(json!({"assembled": matrix(&asm)})).with_csv(matrix_table(&asm)));
    }
    let q = &m.frame().quiver;
    let mut rows = Vec::new();
    for (p, b) in m.layout.paths.iter().zip(&m.blocks) {
        for r in 0..b.nrows() {
            for c in 0..b.ncols() {
                rows.push(vec![p.label(q), r.to_string(), c.to_string(), b[(r, c)].to_string()]);
            }
        }
    }
    let t = Table {
        header: ["path", "row", "col", "value"].map(String::from).to_vec(),
        rows,
    };
    Ok(Report::new(blocks_json(&m)).with_csv(t))
}

pub fn rank_json(m: &ModuliPoint, ctx: Ctx) -> Value {
    let fr = m.frame();
    let r = m.rank_vector(ctx.rank_tol());
    let mut ranks = Map::new();
    let mut dims = Map::new();
    for (i, k) in r.0.iter().enumerate() {
        ranks.insert(fr.hidden_name(i).to_string(), json!(k));
        dims.insert(fr.hidden_name(i).to_string(), json!(fr.hidden_dim(i)));
    }
    json!({
        "rank": ranks,
        "dims": dims,
        "simple": r.0 == fr.hidden_dims(),
    })
}

fn rank(a: &RepInput, ctx: Ctx) -> CliResult<Report> {
    let m = point(a)?;
    Ok(Report::new(rank_json(&m, ctx)))
}

fn dim(a: &RepInput) -> CliResult<Report> {
    let fr = a.frame()?;
    let d = moduli::moduli_dimension(&fr);
    Ok(Report::new(json!({
        "dimension": d.value,
        "expected_only": d.expected_only,
    })))
}

fn simple_exists(a: &RepInput) -> CliResult<Report> {
    let fr = a.frame()?;
    let s = moduli::lbp_simple_exists(&fr);
    Ok(Report::new(json!({
        "exists": s.exists,
        "cycle_type": s.cycle_type,
        "reason": s.reason,
    })))
}
