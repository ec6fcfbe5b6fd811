use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde_json::{json, Map, Value};

use qmn::grad::{self, TrainOptions};
use qmn::network::psi_hat;
use qmn::random::{random_matrix, rng};
use qmn::{Loss, NeuralNetwork, ThinRep};

use super::{names, Ctx};
use crate::error::{CliError, CliResult};
use crate::load::{load_net, load_rep, parse_vector, write_json};
use crate::output::{Report, Table};

#[derive(Debug, Subcommand)]
pub enum NetCmd {
    /// Network function `Ψ(W, f)(x)`.
    Eval(EvalArgs),
    /// Knowledge representation `W_x^f` as a representation file.
    Knowledge(KnowledgeArgs),
    /// `Ψ̂(W)`: the linear network on the all-ones input.
    Psihat(PsihatArgs),
    /// Full-batch gradient descent on a CSV data set.
    Train(TrainArgs),
    /// Back-propagation against central differences at a random sample (`--tol` default 1e-5).
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Clone, Args)]
pub struct NetInput {
    /// Network file: a representation file with `activations` and `bias`.
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long)]
    pub quiver: Option<PathBuf>,
}

impl NetInput {
    fn load(&self) -> CliResult<NeuralNetwork> {
        load_net(&self.net, self.quiver.as_ref())
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub net: NetInput,
    /// Comma-separated input values, one per input vertex.
    #[arg(long, allow_hyphen_values = true)]
    pub input: String,
}

#[derive(Debug, Args)]
pub struct KnowledgeArgs {
    #[command(flatten)]
    pub net: NetInput,
    #[arg(long, allow_hyphen_values = true)]
    pub input: String,
    /// Also write the representation file here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PsihatArgs {
    /// Thin representation file.
    #[arg(long, conflicts_with = "net")]
    pub rep: Option<PathBuf>,
    /// Network file; its weights are used and activations ignored.
    #[arg(long)]
    pub net: Option<PathBuf>,
    #[arg(long)]
    pub quiver: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub net: NetInput,
    /// CSV with the input columns followed by the label columns.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "mse")]
    pub loss: String,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, default_value_t = 500)]
    pub epochs: usize,
    /// Write one JSON record per epoch, including moduli coordinates of the
    /// knowledge representation of the first sample.
    #[arg(long)]
    pub trace_moduli: Option<PathBuf>,
    /// Write the trained network file here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[command(flatten)]
    pub net: NetInput,
    #[arg(long, default_value = "mse")]
    pub loss: String,
    /// Central-difference step.
    #[arg(long, default_value_t = 1e-5)]
    pub step: f64,
    /// Input to check at; drawn from `--seed` when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub input: Option<String>,
    /// Label to check at; drawn from `--seed` when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub label: Option<String>,
    /// Also evaluate the literal gradient formulas (activation in place of its derivative) and report the gap.
    #[arg(long)]
    pub paper_literal: bool,
}

pub fn run(cmd: &NetCmd, ctx: Ctx) -> CliResult<Report> {
    match cmd {
        NetCmd::Eval(a) => eval(a),
        NetCmd::Knowledge(a) => knowledge(a),
        NetCmd::Psihat(a) => psihat(a),
        NetCmd::Train(a) => train(a),
        NetCmd::Gradcheck(a) => gradcheck(a, ctx),
    }
}

fn named(keys: &[String], xs: &[f64]) -> Value {
    Value::Object(keys.iter().cloned().zip(xs.iter().map(|&x| json!(x))).collect::<Map<_, _>>())
}

fn eval(a: &EvalArgs) -> CliResult<Report> {
    let n = a.net.load()?;
    let x = parse_vector(&a.input)?;
    let (y, _) = n.forward(&x)?;
    let outs = names(n.quiver(), n.outputs().iter().copied());
    let t = Table {
        header: outs.clone(),
        rows: vec![y.iter().map(f64::to_string).collect()],
    };
    Ok(Report::new(json!({"input": x, "output": named(&outs, &y)})).with_csv(t))
}

fn knowledge(a: &KnowledgeArgs) -> CliResult<Report> {
    let n = a.net.load()?;
    let x = parse_vector(&a.input)?;
    let k = n.knowledge_map(&x)?;
    let spec = k.to_spec(true);
    if let Some(p) = &a.out {
        write_json(p, &spec)?;
    }
    Ok(Report::new(serde_json::to_value(&spec).expect("serializable")))
}

fn psihat(a: &PsihatArgs) -> CliResult<Report> {
    let w = match (&a.rep, &a.net) {
        (Some(r), _) => ThinRep::from_rep(&load_rep(r, a.quiver.as_ref())?)?,
        (None, Some(n)) => load_net(n, a.quiver.as_ref())?.weights().clone(),
        (None, None) => return Err(CliError::Usage("one of --rep or --net is required".into())),
    };
    let q = w.quiver();
    let outs = names(q, q.sinks());
    let v = psi_hat(&w);
    let t = Table {
        header: outs.clone(),
        rows: vec![v.iter().map(f64::to_string).collect()],
    };
    Ok(Report::new(json!({"psihat": named(&outs, &v)})).with_csv(t))
}

fn train(a: &TrainArgs) -> CliResult<Report> {
    let n = a.net.load()?;
    let loss = Loss::parse(&a.loss).map_err(|e| CliError::Usage(e.to_string()))?;
    let file = File::open(&a.data).map_err(|e| CliError::Invalid(format!("{}: {e}", a.data.display())))?;
    let data = grad::read_samples(file, n.inputs().len(), n.outputs().len())?;
    if data.is_empty() {
        return Err(CliError::Invalid(format!("{}: no samples", a.data.display())));
    }
    let opts = TrainOptions {
        lr: a.lr,
        epochs: a.epochs,
        record_moduli: a.trace_moduli.is_some(),
    };
    let res = grad::train(&n, &data, loss, opts)?;
    if let Some(p) = &a.trace_moduli {
        let err = |e: std::io::Error| CliError::Invalid(format!("{}: {e}", p.display()));
        let mut w = BufWriter::new(File::create(p).map_err(err)?);
        for r in &res.history {
            writeln!(w, "{}", serde_json::to_string(r).expect("serializable")).map_err(err)?;
        }
        w.flush().map_err(err)?;
    }
    let spec = res.network.to_spec();
    if let Some(p) = &a.out {
        write_json(p, &spec)?;
    }
    let first = res.history.first().expect("history has epoch 0");
    let last = res.history.last().expect("history has epoch 0");
    let worst = res.history.iter().fold(0.0f64, |m, r| m.max(r.factorization_residual));
    let t = Table {
        header: ["epoch", "loss", "factorization_residual"].map(String::from).to_vec(),
        rows: res
            .history
            .iter()
            .map(|r| vec![r.epoch.to_string(), r.loss.to_string(), r.factorization_residual.to_string()])
            .collect(),
    };
    Ok(Report::new(json!({
        "samples": data.len(),
        "epochs": a.epochs,
        "initial_loss": first.loss,
        "final_loss": last.loss,
        "max_factorization_residual": worst,
        "network": spec,
    }))
    .with_csv(t))
}

fn one_hot(z: &[f64]) -> Vec<f64> {
    let k = z
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v > z[best] { i } else { best });
    (0..z.len()).map(|i| if i == k { 1.0 } else { 0.0 }).collect()
}

fn gradcheck(a: &GradcheckArgs, ctx: Ctx) -> CliResult<Report> {
    let n = a.net.load()?;
    let loss = Loss::parse(&a.loss).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut r = rng(ctx.seed);
    let x = match &a.input {
        Some(s) => parse_vector(s)?,
        None => random_matrix::<f64>(n.inputs().len(), 1, &mut r).as_slice().to_vec(),
    };
    let y = match &a.label {
        Some(s) => parse_vector(s)?,
        None => {
            let z = random_matrix::<f64>(n.outputs().len(), 1, &mut r).as_slice().to_vec();
            match loss {
                Loss::CrossEntropy => one_hot(&z),
                Loss::Mse => z,
            }
        }
    };
    let tol = ctx.tol_or(1e-5);
    let g = grad::gradcheck(&n, &x, &y, loss, a.step)?;
    let q = n.quiver();
    let arrows: Vec<Value> = q
        .arrows()
        .iter()
        .enumerate()
        .map(|(k, ar)| json!({"arrow": ar.id, "analytic": g.analytic[k], "numeric": g.numeric[k]}))
        .collect();
    let passed = g.relative_error <= tol;
    let mut v = json!({
        "input": x,
        "label": y,
        "loss": a.loss,
        "relative_error": g.relative_error,
        "tol": tol,
        "passed": passed,
        "arrows": arrows,
    });
    if a.paper_literal {
        let c = grad::compare_literal(&n, &x, &y, loss)?;
        let per: Vec<Value> = q
            .arrows()
            .iter()
            .enumerate()
            .map(|(k, ar)| json!({"arrow": ar.id, "reference": c.reference[k], "literal": c.literal[k]}))
            .collect();
        v["literal"] = json!({"relative_error": c.relative_error, "arrows": per});
    }
    Ok(Report::new(v).fail_if(!passed, format!("relative error {:e} exceeds {tol:e}", g.relative_error)))
}
