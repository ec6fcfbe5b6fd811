use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Subcommand};
use serde_json::json;

use qmn::fixtures::{self, D4Symbols};
use qmn::linalg::numerical_rank;
use qmn::moduli::{self, ModuliLayout};
use qmn::network::{point_network_matrix, psi_hat};
use qmn::random::rng;
use qmn::relu::{self, Level};
use qmn::{ActivationTag, FramedQuiver, NeuralNetwork, RankTolerance, Representation, ThinRep};

use super::moduli::{blocks_json, rank_json};
use super::relu::momentum_json;
use super::Ctx;
use crate::error::{CliError, CliResult};
use crate::load::write_json;
use crate::output::{matrix, Report, Table};

#[derive(Debug, Subcommand)]
pub enum ExampleCmd {
    /// D̃₄-shaped network with a random thin triple drawn from `--seed`.
    D4tilde(OutDir),
    /// `i -> j -> k`, whose moduli space is the affine line.
    A3(A3Args),
    /// `s -> v -> t` with ReLU at `v`.
    SingleVertexRelu(SvArgs),
}

#[derive(Debug, Args)]
pub struct OutDir {
    /// Write `quiver.json` and `rep.json` (and `net.json` where relevant) here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct A3Args {
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub b: f64,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct SvArgs {
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub f: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub h: f64,
    #[command(flatten)]
    pub out: OutDir,
}

pub fn run(cmd: &ExampleCmd, ctx: Ctx) -> CliResult<Report> {
    match cmd {
        ExampleCmd::D4tilde(o) => d4tilde(o, ctx),
        ExampleCmd::A3(a) => a3(a, ctx),
        ExampleCmd::SingleVertexRelu(a) => single_vertex(a, ctx),
    }
}

fn emit(dir: Option<&PathBuf>, rep: &Representation, net: Option<&NeuralNetwork>) -> CliResult<()> {
    let Some(dir) = dir else { return Ok(()) };
    fs::create_dir_all(dir).map_err(|e| CliError::Invalid(format!("{}: {e}", dir.display())))?;
    let file = |name: &str| Path::new(dir).join(name);
    write_json(&file("quiver.json"), &rep.quiver().to_spec())?;
    write_json(&file("rep.json"), &rep.to_spec(false))?;
    if let Some(n) = net {
        write_json(&file("net.json"), &n.to_spec())?;
    }
    Ok(())
}

fn d4tilde(o: &OutDir, ctx: Ctx) -> CliResult<Report> {
    let s = D4Symbols::random(&mut rng(ctx.seed));
    let t = fixtures::d4tilde_triple(&s);
    let rep = t.join();
    let frame = t.frame.clone();
    let layout = Arc::new(ModuliLayout::new(frame.clone())?);
    let m = layout.project(&t)?;

    let expected = moduli::moduli_dimension(&frame);
    let jac = moduli::finite_difference_jacobian(&layout, &t, 1e-5)?;
    let jac_rank = numerical_rank(&jac, RankTolerance::relative(1e-6));

    let template = fixtures::d4tilde_template(&s);
    let asm = m.assembled();
    let template_gap = (&asm - &template).abs().max();
    let nm = point_network_matrix(&m);
    let direct = fixtures::d4tilde_network_matrix(&s);
    let network_gap = (&nm - &direct).abs().max();
    let scale = direct.abs().max().max(template.abs().max()).max(1.0);
    let factorizes = template_gap <= 1e-12 * scale && network_gap <= 1e-12 * scale;

    emit(o.out_dir.as_ref(), &rep, None)?;
    let dim_ok = jac_rank as i64 == expected.value;
    let v = json!({
        "seed": ctx.seed,
        "quiver": rep.quiver().to_spec(),
        "rep": rep.to_spec(false),
        "coords": blocks_json(&m),
        "assembled": matrix(&asm),
        "rank": rank_json(&m, ctx),
        "dimension": {
            "expected": expected.value,
            "jacobian_rank": jac_rank,
            "matches": dim_ok,
        },
        "factorization": {
            "template_residual": template_gap,
            "network_matrix": matrix(&nm),
            "network_residual": network_gap,
            "holds": factorizes,
        },
    });
    Ok(Report::new(v)
        .fail_if(!dim_ok, format!("Jacobian rank {jac_rank} differs from dimension {}", expected.value))
        .fail_if(!factorizes, "network matrix does not factor through the moduli point"))
}

fn a3(a: &A3Args, ctx: Ctx) -> CliResult<Report> {
    let rep = fixtures::a3_rep(a.a, a.b);
    let frame = Arc::new(FramedQuiver::thin(rep.quiver().clone()));
    let t = qmn::split(&frame, &rep)?;
    let m = moduli::project(&t)?;
    let d = moduli::moduli_dimension(&frame);
    emit(a.out.out_dir.as_ref(), &rep, None)?;
    Ok(Report::new(json!({
        "quiver": rep.quiver().to_spec(),
        "rep": rep.to_spec(false),
        "coords": blocks_json(&m),
        "rank": rank_json(&m, ctx),
        "dimension": d.value,
    })))
}

fn single_vertex(a: &SvArgs, ctx: Ctx) -> CliResult<Report> {
    let rep = fixtures::single_vertex_rep(a.f, a.h);
    let t = fixtures::single_vertex_triple(a.f, a.h);
    let mu = relu::thin_momentum(&t)?[0];
    let net = NeuralNetwork::uniform(ThinRep::from_rep(&rep)?, ActivationTag::Relu)?;
    let mut rows = Vec::new();
    let mut table = Vec::new();
    for k in -4..=4 {
        let x = k as f64 * 0.5;
        let (y, _) = net.forward(&[x])?;
        let via_knowledge = match net.knowledge_map(&[x]) {
            Ok(kn) => Some(psi_hat(&kn)[0]),
            Err(qmn::Error::SingularPreActivation(_)) => None,
            Err(e) => return Err(e.into()),
        };
        rows.push(json!({"x": x, "output": y[0], "psihat_knowledge": via_knowledge}));
        table.push(vec![
            x.to_string(),
            y[0].to_string(),
            via_knowledge.map_or_else(String::new, |v| v.to_string()),
        ]);
    }
    let balanced = match relu::balance(&t, Level::Zero, ctx.tol_or(1e-8)) {
        Ok(b) => json!({
            "gauge": b.gauge[0],
            "f": b.triple.f[0][(0, 0)],
            "h": b.triple.h[0][(0, 0)],
            "momentum": momentum_json(&b.triple),
        }),
        Err(e) if e.is_numeric() => json!({"error": e.to_string()}),
        Err(e) => return Err(e.into()),
    };
    emit(a.out.out_dir.as_ref(), &rep, Some(&net))?;
    let v = json!({
        "f": a.f,
        "h": a.h,
        "momentum": mu,
        "moduli": a.f * a.h,
        "function": rows,
        "balanced_level_0": balanced,
    });
    let t = Table {
        header: ["x", "output", "psihat_knowledge"].map(String::from).to_vec(),
        rows: table,
    };
    Ok(Report::new(v).with_csv(t))
}
