//! Losses, reverse-mode gradients of `L(Ψ(W,f)(x), y)` with respect to the
//! arrow weights, and plain full-batch gradient descent.
//!
//! Three gradient routines live here:
//! - [`backprop`] is the reference chain rule on the forward trace.
//! - [`backprop_factored`] reads everything from the knowledge
//!   representation `W_x^f` and the weights `W`.
//! - [`backprop_literal`] evaluates the combinatorial formulas exactly as
//!   written, with `f` where the chain rule asks for `df`; it is kept for
//!   comparison only.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moduli;
use crate::network::{psi_hat, psi_hat_vertices, vertex_gauge, NeuralNetwork};
use crate::quiver::{ArrowId, Quiver, Role};
use crate::thincat::{ThinRep, ZERO_WEIGHT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Loss {
    /// `Σ (z_i - y_i)²`.
    #[default]
    Mse,
    /// `-Σ y_i log softmax(z)_i`.
    CrossEntropy,
}

impl Loss {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "mse" => Ok(Loss::Mse),
            "cross-entropy" | "ce" | "xent" => Ok(Loss::CrossEntropy),
            _ => Err(Error::Parse(format!("unknown loss `{s}`"))),
        }
    }

    pub fn value(self, z: &[f64], y: &[f64]) -> f64 {
        match self {
            Loss::Mse => z.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum(),
            Loss::CrossEntropy => {
                let lse = log_sum_exp(z);
                -z.iter().zip(y).map(|(a, b)| b * (a - lse)).sum::<f64>()
            }
        }
    }

    /// `∂L/∂z`.
    pub fn gradient(self, z: &[f64], y: &[f64]) -> Vec<f64> {
        match self {
            Loss::Mse => z.iter().zip(y).map(|(a, b)| 2.0 * (a - b)).collect(),
            Loss::CrossEntropy => {
                let total: f64 = y.iter().sum();
                softmax(z).iter().zip(y).map(|(s, b)| s * total - b).collect()
            }
        }
    }
}

fn log_sum_exp(z: &[f64]) -> f64 {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + z.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

pub fn softmax(z: &[f64]) -> Vec<f64> {
    let lse = log_sum_exp(z);
    z.iter().map(|x| (x - lse).exp()).collect()
}

/// One scalar `dW_α` per arrow. Gauge transformations act on it as on a
/// thin representation of the opposite quiver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientRep {
    #[serde(skip)]
    pub quiver: Arc<Quiver>,
    pub dw: Vec<f64>,
}

impl GradientRep {
    pub fn as_opposite(&self) -> ThinRep {
        ThinRep::new(Arc::new(self.quiver.opposite()), self.dw.clone()).expect("same arrow count")
    }

    pub fn max_abs(&self) -> f64 {
        self.dw.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `max |a - b| / max |a|`.
    pub fn relative_error(&self, other: &GradientRep) -> f64 {
        let diff = self.dw.iter().zip(&other.dw).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let scale = self.max_abs();
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

fn check_label(n: &NeuralNetwork, y: &[f64]) -> Result<()> {
    if y.len() != n.outputs().len() {
        return Err(Error::LabelLength {
            expected: n.outputs().len(),
            found: y.len(),
        });
    }
    Ok(())
}

/// Adjoints from the reference sweep: `da_v = ∂L/∂a_v` and `δ_v = ∂L/∂pre_v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BackpropTrace {
    pub da: Vec<f64>,
    pub delta: Vec<f64>,
    pub loss: f64,
}

pub fn backprop(n: &NeuralNetwork, x: &[f64], y: &[f64], loss: Loss) -> Result<GradientRep> {
    Ok(backprop_with_trace(n, x, y, loss)?.0)
}

pub fn backprop_with_trace(
    n: &NeuralNetwork,
    x: &[f64],
    y: &[f64],
    loss: Loss,
) -> Result<(GradientRep, BackpropTrace)> {
    check_label(n, y)?;
    let (z, tr) = n.forward(x)?;
    let q = n.quiver();
    let w = n.weights();
    let nv = q.vertex_count();
    let mut da = vec![0.0; nv];
    let mut delta = vec![0.0; nv];
    for (k, dl) in loss.gradient(&z, y).into_iter().enumerate() {
        da[n.outputs()[k].0] = dl;
    }
    for &v in q.topological_order().iter().rev() {
        if q.is_sink(v) {
            delta[v.0] = da[v.0];
            continue;
        }
        da[v.0] = q
            .outgoing(v)
            .iter()
            .map(|&al| w.weight(al) * delta[q.arrow(al).target.0])
            .sum();
        if q.is_hidden(v) {
            delta[v.0] = n.activation(v).derivative(tr.pre[v.0]) * da[v.0];
        }
    }
    let dw = q
        .arrows()
        .iter()
        .map(|ar| delta[ar.target.0] * tr.a[ar.source.0])
        .collect();
    let g = GradientRep {
        quiver: q.clone(),
        dw,
    };
    Ok((g, BackpropTrace { da, delta, loss: loss.value(&z, y) }))
}

/// The gradient computed from `W_x^f` and `W` alone: adjoints run through
/// the linear network `W_x^f` on the all-ones input, and the activation
/// outputs are read back as `Ψ̂(W_x^f)_s · (W_x^f)_α / W_α`. Agrees with
/// [`backprop`] whenever `a/pre-a` equals the derivative, i.e. for identity
/// and ReLU activations.
pub fn backprop_factored(n: &NeuralNetwork, x: &[f64], y: &[f64], loss: Loss) -> Result<GradientRep> {
    check_label(n, y)?;
    let k = n.knowledge_map(x)?;
    factored_from_knowledge(n, &k, y, loss)
}

pub fn factored_from_knowledge(n: &NeuralNetwork, k: &ThinRep, y: &[f64], loss: Loss) -> Result<GradientRep> {
    let q = n.quiver();
    let w = n.weights();
    let psi = psi_hat_vertices(k);
    let z: Vec<f64> = n.outputs().iter().map(|v| psi[v.0]).collect();
    let mut delta = vec![0.0; q.vertex_count()];
    for (i, dl) in loss.gradient(&z, y).into_iter().enumerate() {
        delta[n.outputs()[i].0] = dl;
    }
    for &v in q.topological_order().iter().rev() {
        if q.is_hidden(v) {
            delta[v.0] = q
                .outgoing(v)
                .iter()
                .map(|&al| k.weight(al) * delta[q.arrow(al).target.0])
                .sum();
        }
    }
    let mut a = vec![0.0; q.vertex_count()];
    for v in q.vertices() {
        a[v.0] = match q.role(v) {
            Role::Bias => 1.0,
            Role::Output => continue,
            role => {
                let ratio = q
                    .outgoing(v)
                    .iter()
                    .find(|&&al| w.weight(al).abs() >= ZERO_WEIGHT_TOL)
                    .map(|&al| k.weight(al) / w.weight(al));
                match ratio {
                    Some(r) if role == Role::Input => r,
                    Some(r) => r * psi[v.0],
                    // no arrow out of v carries weight: a_v never matters downstream,
                    // but dW on those arrows needs it
                    None => return Err(Error::UnrecoverableInput(q.name(v).to_string())),
                }
            }
        };
    }
    let dw = q
        .arrows()
        .iter()
        .map(|ar| delta[ar.target.0] * a[ar.source.0])
        .collect();
    Ok(GradientRep {
        quiver: q.clone(),
        dw,
    })
}

/// The combinatorial formulas evaluated verbatim on `W_x^f`: sink adjoints
/// summed over in-arrows, `f` in place of `df` for deeper adjoints, and
/// `f_s(Ψ̂_s)` with `Ψ̂_s = 1` at sources.
pub fn backprop_literal(n: &NeuralNetwork, x: &[f64], y: &[f64], loss: Loss) -> Result<GradientRep> {
    check_label(n, y)?;
    let k = n.knowledge_map(x)?;
    let q = n.quiver();
    let w = n.weights();
    let psi = psi_hat_vertices(&k);
    let f = |v: crate::quiver::VertexId| {
        if q.is_hidden(v) {
            n.activation(v).eval(psi[v.0])
        } else {
            psi[v.0]
        }
    };
    let df = |v: crate::quiver::VertexId| {
        if q.is_hidden(v) {
            n.activation(v).derivative(psi[v.0])
        } else {
            1.0
        }
    };
    let z: Vec<f64> = n.outputs().iter().map(|v| psi[v.0]).collect();
    let mut dl = vec![0.0; q.vertex_count()];
    for (i, g) in loss.gradient(&z, y).into_iter().enumerate() {
        dl[n.outputs()[i].0] = g;
    }
    let mut da = vec![0.0; q.vertex_count()];
    for &v in q.topological_order().iter().rev() {
        let out = q.outgoing(v);
        da[v.0] = if q.is_sink(v) {
            q.incoming(v).len() as f64 * dl[v.0]
        } else if out.iter().all(|&al| q.is_sink(q.arrow(al).target)) {
            out.iter().map(|&al| w.weight(al) * da[q.arrow(al).target.0]).sum()
        } else {
            out.iter()
                .map(|&al| {
                    let t = q.arrow(al).target;
                    w.weight(al) * da[t.0] * f(t)
                })
                .sum()
        };
    }
    let dw = q
        .arrows()
        .iter()
        .map(|ar| {
            if q.is_sink(ar.target) {
                dl[ar.target.0] * f(ar.source)
            } else {
                da[ar.target.0] * df(ar.target) * f(ar.source)
            }
        })
        .collect();
    Ok(GradientRep {
        quiver: q.clone(),
        dw,
    })
}

/// Normwise gap between the literal formulas and the reference gradient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiteralComparison {
    pub reference: Vec<f64>,
    pub literal: Vec<f64>,
    pub relative_error: f64,
}

pub fn compare_literal(n: &NeuralNetwork, x: &[f64], y: &[f64], loss: Loss) -> Result<LiteralComparison> {
    let r = backprop(n, x, y, loss)?;
    let l = backprop_literal(n, x, y, loss)?;
    Ok(LiteralComparison {
        relative_error: r.relative_error(&l),
        reference: r.dw,
        literal: l.dw,
    })
}

/// `dW_α ↦ dW_α · g_s(α) / g_t(α)` for hidden scalars `g` (1 at framed ends).
pub fn gradient_transform(hidden_gauge: &[f64], dw: &GradientRep) -> GradientRep {
    let g = vertex_gauge(&dw.quiver, hidden_gauge);
    let out = dw
        .quiver
        .arrows()
        .iter()
        .zip(&dw.dw)
        .map(|(ar, d)| d * g[ar.source.0] / g[ar.target.0])
        .collect();
    GradientRep {
        quiver: dw.quiver.clone(),
        dw: out,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Reads rows of `inputs` values followed by `outputs` labels. A header row
/// is skipped when its first field is not a number.
pub fn read_samples<R: std::io::Read>(reader: R, inputs: usize, outputs: usize) -> Result<Vec<Sample>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        let vals = match parsed {
            Ok(v) => v,
            Err(_) if line == 0 => continue,
            Err(e) => return Err(Error::Parse(format!("row {}: {e}", line + 1))),
        };
        if vals.len() != inputs + outputs {
            return Err(Error::Parse(format!(
                "row {} has {} columns, expected {}",
                line + 1,
                vals.len(),
                inputs + outputs
            )));
        }
        out.push(Sample {
            x: vals[..inputs].to_vec(),
            y: vals[inputs..].to_vec(),
        });
    }
    Ok(out)
}

pub fn write_samples<W: std::io::Write>(writer: W, data: &[Sample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for s in data {
        let row: Vec<String> = s.x.iter().chain(&s.y).map(|v| v.to_string()).collect();
        w.write_record(&row).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

/// Mean loss and mean gradient over a batch. Per-sample work runs in
/// parallel; the reduction follows input order.
pub fn batch_gradient(n: &NeuralNetwork, data: &[Sample], loss: Loss) -> Result<(f64, GradientRep)> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("empty data set".into()));
    }
    let per: Vec<(GradientRep, BackpropTrace)> = data
        .par_iter()
        .map(|s| backprop_with_trace(n, &s.x, &s.y, loss))
        .collect::<Result<_>>()?;
    let m = data.len() as f64;
    let mut dw = vec![0.0; n.quiver().arrow_count()];
    let mut total = 0.0;
    for (g, tr) in &per {
        total += tr.loss;
        for (acc, d) in dw.iter_mut().zip(&g.dw) {
            *acc += d;
        }
    }
    dw.iter_mut().for_each(|d| *d /= m);
    Ok((
        total / m,
        GradientRep {
            quiver: n.quiver().clone(),
            dw,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOptions {
    pub lr: f64,
    pub epochs: usize,
    /// Store the flattened moduli coordinates of `W_x^f` for the first sample.
    pub record_moduli: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    /// Worst relative gap between `Ψ(W,f)(x)` and `Ψ̂(W_x^f)` over the batch;
    /// samples where the knowledge map is undefined are skipped.
    pub factorization_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moduli: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    pub network: NeuralNetwork,
    /// Entry `k` describes the weights after `k` steps.
    pub history: Vec<EpochRecord>,
}

pub fn factorization_residual(n: &NeuralNetwork, data: &[Sample]) -> Result<f64> {
    let mut worst = 0.0f64;
    for s in data {
        let k = match n.knowledge_map(&s.x) {
            Ok(k) => k,
            Err(Error::SingularPreActivation(_)) => continue,
            Err(e) => return Err(e),
        };
        let (out, _) = n.forward(&s.x)?;
        let hat = psi_hat(&k);
        let scale = out.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let gap = out.iter().zip(&hat).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        worst = worst.max(gap / scale);
    }
    Ok(worst)
}

fn record(n: &NeuralNetwork, data: &[Sample], epoch: usize, loss: f64, opts: &TrainOptions) -> Result<EpochRecord> {
    let moduli = if opts.record_moduli {
        match n.knowledge_map(&data[0].x) {
            Ok(k) => Some(moduli::project(&k.triple())?.flatten()),
            Err(Error::SingularPreActivation(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok(EpochRecord {
        epoch,
        loss,
        factorization_residual: factorization_residual(n, data)?,
        moduli,
    })
}

/// Full-batch gradient descent `W ← W - lr · mean(dW)`.
pub fn train(n: &NeuralNetwork, data: &[Sample], loss: Loss, opts: TrainOptions) -> Result<TrainResult> {
    if opts.lr.is_nan() || opts.lr < 0.0 {
        return Err(Error::InvalidArgument("learning rate must be non-negative".into()));
    }
    let mut net = n.clone();
    let mut history = Vec::with_capacity(opts.epochs + 1);
    for epoch in 0..=opts.epochs {
        let (l, g) = batch_gradient(&net, data, loss)?;
        if !l.is_finite() || l > 1e12 {
            return Err(Error::DivergenceDetected { epoch, loss: l });
        }
        history.push(record(&net, data, epoch, l, &opts)?);
        if epoch == opts.epochs {
            break;
        }
        let mut w = net.weights().clone();
        for (k, d) in g.dw.iter().enumerate() {
            let a = ArrowId(k);
            w.set_weight(a, w.weight(a) - opts.lr * d);
        }
        net = net.with_weights(w)?;
    }
    Ok(TrainResult { network: net, history })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradCheck {
    pub analytic: Vec<f64>,
    pub numeric: Vec<f64>,
    /// `max |analytic - numeric| / max |analytic|`.
    pub relative_error: f64,
}

/// Compares [`backprop`] with central differences of step `h`.
pub fn gradcheck(n: &NeuralNetwork, x: &[f64], y: &[f64], loss: Loss, h: f64) -> Result<GradCheck> {
    let g = backprop(n, x, y, loss)?;
    let mut numeric = Vec::with_capacity(g.dw.len());
    for k in 0..g.dw.len() {
        let a = ArrowId(k);
        let eval = |delta: f64| -> Result<f64> {
            let mut w = n.weights().clone();
            w.set_weight(a, w.weight(a) + delta);
            let (z, _) = n.with_weights(w)?.forward(x)?;
            Ok(loss.value(&z, y))
        };
        numeric.push((eval(h)? - eval(-h)?) / (2.0 * h));
    }
    let fd = GradientRep {
        quiver: g.quiver.clone(),
        dw: numeric,
    };
    Ok(GradCheck {
        relative_error: g.relative_error(&fd),
        analytic: g.dw,
        numeric: fd.dw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::network::ActivationTag;
    use crate::random::{random_thin, rng};
    use rand::Rng;

    fn single(f: f64, h: f64, tag: ActivationTag) -> NeuralNetwork {
        let w = ThinRep::from_rep(&fixtures::single_vertex_rep(f, h)).unwrap();
        NeuralNetwork::uniform(w, tag).unwrap()
    }

    fn mlp(widths: &[usize], bias: bool) -> Arc<Quiver> {
        Arc::new(fixtures::mlp_quiver(widths, bias))
    }

    #[test]
    fn single_vertex_closed_form() {
        let (f, h, x, y) = (1.5, -0.7, 2.0, 0.3);
        let n = single(f, h, ActivationTag::Identity);
        let g = backprop(&n, &[x], &[y], Loss::Mse).unwrap();
        let r = h * f * x - y;
        assert!((g.dw[0] - 2.0 * r * h * x).abs() < 1e-14);
        assert!((g.dw[1] - 2.0 * r * f * x).abs() < 1e-14);
    }

    #[test]
    fn zero_weights_zero_gradient() {
        let n = single(0.0, 0.0, ActivationTag::Tanh);
        let g = backprop(&n, &[1.3], &[0.0], Loss::Mse).unwrap();
        assert_eq!(g.dw, vec![0.0, 0.0]);
    }

    #[test]
    fn softmax_and_cross_entropy() {
        let z = [1.0, -2.0, 0.5];
        let s = softmax(&z);
        assert!((s.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let y = [0.0, 1.0, 0.0];
        let g = Loss::CrossEntropy.gradient(&z, &y);
        for i in 0..3 {
            let e = |d: f64| {
                let mut zz = z;
                zz[i] += d;
                Loss::CrossEntropy.value(&zz, &y)
            };
            let fd = (e(1e-6) - e(-1e-6)) / 2e-6;
            assert!((fd - g[i]).abs() < 1e-8);
        }
        assert_eq!(Loss::Mse.value(&z, &z), 0.0);
    }

    #[test]
    fn label_length_checked() {
        let n = single(1.0, 1.0, ActivationTag::Identity);
        assert!(matches!(backprop(&n, &[1.0], &[1.0, 2.0], Loss::Mse), Err(Error::LabelLength { .. })));
    }

    #[test]
    fn finite_differences_on_mlps() {
        let mut r = rng(21);
        for tag in [ActivationTag::Tanh, ActivationTag::Sigmoid] {
            for _ in 0..10 {
                let q = mlp(&[2, 3, 2], true);
                let n = NeuralNetwork::uniform(random_thin(&q, &mut r), tag).unwrap();
                let x: Vec<f64> = (0..2).map(|_| r.random_range(-1.0..1.0)).collect();
                let y: Vec<f64> = (0..2).map(|_| r.random_range(-1.0..1.0)).collect();
                for loss in [Loss::Mse, Loss::CrossEntropy] {
                    let c = gradcheck(&n, &x, &y, loss, 1e-5).unwrap();
                    assert!(c.relative_error <= 1e-5, "{tag:?} {loss:?} {}", c.relative_error);
                }
            }
        }
    }

    #[test]
    fn factored_matches_for_identity_and_relu() {
        let mut r = rng(22);
        let q = mlp(&[2, 3, 3, 2], true);
        for tag in [ActivationTag::Identity, ActivationTag::Relu] {
            let mut checked = 0;
            while checked < 20 {
                let n = NeuralNetwork::uniform(random_thin(&q, &mut r), tag).unwrap();
                let x: Vec<f64> = (0..2).map(|_| r.random_range(-1.0..1.0)).collect();
                let y = vec![0.5, -0.5];
                let Ok(fac) = backprop_factored(&n, &x, &y, Loss::Mse) else { continue };
                let reference = backprop(&n, &x, &y, Loss::Mse).unwrap();
                assert!(reference.relative_error(&fac) <= 1e-9);
                checked += 1;
            }
        }
    }

    #[test]
    fn factored_differs_for_tanh() {
        let mut r = rng(23);
        let q = mlp(&[2, 3, 3, 1], false);
        let n = NeuralNetwork::uniform(random_thin(&q, &mut r), ActivationTag::Tanh).unwrap();
        let fac = backprop_factored(&n, &[0.7, -0.4], &[1.0], Loss::Mse).unwrap();
        let reference = backprop(&n, &[0.7, -0.4], &[1.0], Loss::Mse).unwrap();
        assert!(reference.relative_error(&fac) > 1e-6);
    }

    #[test]
    fn factored_reports_unrecoverable_input() {
        let n = single(0.0, 1.0, ActivationTag::Identity);
        // pre-activation at v vanishes first
        assert!(matches!(backprop_factored(&n, &[1.0], &[0.0], Loss::Mse), Err(Error::SingularPreActivation(_))));
        let q = Arc::new(Quiver::new(&["s", "v", "t"], &[("f", "s", "v"), ("h", "v", "t"), ("k", "s", "t")]).unwrap());
        let n = NeuralNetwork::uniform(ThinRep::new(q, vec![0.0, 1.0, 0.0]).unwrap(), ActivationTag::Identity).unwrap();
        assert!(matches!(
            factored_from_knowledge(&n, &n.weights().clone(), &[0.0], Loss::Mse),
            Err(Error::UnrecoverableInput(v)) if v == "s"
        ));
    }

    #[test]
    fn literal_formulas_agree_only_in_the_simplest_case() {
        let n = single(1.5, -0.7, ActivationTag::Identity);
        let c = compare_literal(&n, &[1.0], &[0.2], Loss::Mse).unwrap();
        assert!(c.relative_error <= 1e-12, "{c:?}");
        // away from x = 1 the source factor f_s(Ψ̂_s) = 1 no longer equals x
        let c = compare_literal(&n, &[2.0], &[0.2], Loss::Mse).unwrap();
        assert!(c.relative_error > 1e-3);
        let mut r = rng(24);
        let q = mlp(&[2, 3, 3, 1], false);
        let n = NeuralNetwork::uniform(random_thin(&q, &mut r), ActivationTag::Tanh).unwrap();
        let c = compare_literal(&n, &[1.0, 1.0], &[0.0], Loss::Mse).unwrap();
        assert!(c.relative_error > 1e-3);
    }

    #[test]
    fn gauge_equivariance() {
        let mut r = rng(25);
        let q = mlp(&[2, 3, 2], true);
        for tag in [ActivationTag::Relu, ActivationTag::Identity] {
            let n = NeuralNetwork::uniform(random_thin(&q, &mut r), tag).unwrap();
            let g: Vec<f64> = (0..3)
                .map(|_| {
                    let m: f64 = r.random_range(0.5..2.0);
                    if tag == ActivationTag::Identity && r.random_bool(0.5) { -m } else { m }
                })
                .collect();
            let (x, y) = ([0.4, -0.9], [1.0, 0.0]);
            let lhs = backprop(&n.act(&g), &x, &y, Loss::Mse).unwrap();
            let rhs = gradient_transform(&g, &backprop(&n, &x, &y, Loss::Mse).unwrap());
            assert!(lhs.relative_error(&rhs) <= 1e-12);
            assert_eq!(gradient_transform(&[1.0; 3], &lhs), lhs);
        }
    }

    #[test]
    fn opposite_view_has_reversed_arrows() {
        let n = single(2.0, 3.0, ActivationTag::Identity);
        let g = backprop(&n, &[1.0], &[0.0], Loss::Mse).unwrap();
        let op = g.as_opposite();
        let f = op.quiver().arrow(op.quiver().arrow_id("f").unwrap());
        assert_eq!(op.quiver().name(f.source), "v");
    }

    #[test]
    fn train_fits_linear_target() {
        let n = single(0.5, 0.5, ActivationTag::Identity);
        let data: Vec<Sample> = [-1.0, -0.5, 0.5, 1.0]
            .iter()
            .map(|&x| Sample { x: vec![x], y: vec![2.0 * x] })
            .collect();
        let opts = TrainOptions { lr: 0.05, epochs: 500, record_moduli: true };
        let res = train(&n, &data, Loss::Mse, opts).unwrap();
        let last = res.history.last().unwrap();
        assert!(last.loss < 1e-6, "{}", last.loss);
        assert!(res.history.iter().all(|e| e.factorization_residual <= 1e-9));
        assert!(res.history.windows(2).all(|w| w[1].loss <= w[0].loss + 1e-15));
        let hf = last.moduli.as_ref().unwrap()[0];
        assert!((hf - 2.0 * data[0].x[0]).abs() < 1e-3);
    }

    #[test]
    fn zero_learning_rate_keeps_weights() {
        let n = single(0.5, 0.5, ActivationTag::Tanh);
        let data = vec![Sample { x: vec![1.0], y: vec![1.0] }];
        let res = train(&n, &data, Loss::Mse, TrainOptions { lr: 0.0, epochs: 3, record_moduli: false }).unwrap();
        assert_eq!(res.network, n);
        assert_eq!(res.history.len(), 4);
    }

    #[test]
    fn divergence_is_reported() {
        let n = single(1.0, 1.0, ActivationTag::Identity);
        let data = vec![Sample { x: vec![10.0], y: vec![0.0] }];
        let err = train(&n, &data, Loss::Mse, TrainOptions { lr: 1.0, epochs: 100, record_moduli: false }).unwrap_err();
        assert!(matches!(err, Error::DivergenceDetected { .. }));
    }

    #[test]
    fn csv_roundtrip() {
        let text = "x1,x2,y\n1,2,3\n# note\n-1.5, 0, 2e-3\n";
        let data = read_samples(text.as_bytes(), 2, 1).unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data[1].x, vec![-1.5, 0.0]);
        let mut buf = Vec::new();
        write_samples(&mut buf, &data).unwrap();
        assert_eq!(read_samples(buf.as_slice(), 2, 1).unwrap(), data);
        assert!(read_samples("1,2\n".as_bytes(), 2, 1).is_err());
    }
}
