pub mod example;
pub mod moduli;
pub mod net;
pub mod relu;
pub mod thin;

use std::path::PathBuf;

use clap::Args;
use serde_json::{json, Value};

use qmn::{Quiver, QuiverSpec, RankTolerance};

use crate::error::CliResult;
use crate::load::read_json;
use crate::output::Report;

/// Global settings shared by every verb.
#[derive(Debug, Clone, Copy)]
pub struct Ctx {
    pub seed: u64,
    pub tol: Option<f64>,
}

impl Ctx {
    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn rank_tol(&self) -> RankTolerance {
        self.tol.map_or_else(RankTolerance::default, RankTolerance::relative)
    }
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub quiver: PathBuf,
    /// Also require the network conditions (no parallel arrows, connected).
    #[arg(long)]
    pub network: bool,
}

pub fn validate(a: &ValidateArgs) -> CliResult<Report> {
    let spec: QuiverSpec = read_json(&a.quiver)?;
    let q = Quiver::from_spec(&spec)?;
    let c = q.classify();
    let network = if a.network {
        Some(q.clone().into_network()?.is_network())
    } else {
        None
    };
    let roles: serde_json::Map<String, Value> =
        q.vertices().map(|v| (q.name(v).to_string(), json!(q.role(v).to_string()))).collect();
    let mut v = json!({
        "valid": true,
        "vertices": q.vertex_count(),
        "arrows": q.arrow_count(),
        "sources": c.sources,
        "sinks": c.sinks,
        "hidden": c.hidden,
        "components": c.components,
        "roles": roles,
    });
    if !c.degenerate.is_empty() {
        v["isolated"] = json!(c.degenerate);
    }
    if let Some(n) = network {
        v["network"] = json!(n);
    }
    Ok(Report::new(v))
}

pub fn names(q: &Quiver, vs: impl IntoIterator<Item = qmn::VertexId>) -> Vec<String> {
    vs.into_iter().map(|v| q.name(v).to_string()).collect()
}
