//! Neural networks as thin representations with activation functions:
//! forward evaluation, the `in`/`out` maps around the moduli point, the
//! knowledge map `x ↦ W_x^f` and the evaluation `Ψ̂`.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moduli::{self, ModuliPoint};
use crate::quiver::{Quiver, QuiverSpec, Role, VertexId};
use crate::rep::{DoubleFramedTriple, FramedQuiver, RepSpec, Representation};
use crate::thincat::ThinRep;

/// Pre-activations smaller than this make the knowledge map undefined.
pub const SINGULAR_PRE_ACTIVATION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivationTag {
    #[default]
    Identity,
    Relu,
    Tanh,
    Sigmoid,
}

impl ActivationTag {
    pub fn eval(self, z: f64) -> f64 {
        match self {
            ActivationTag::Identity => z,
            ActivationTag::Relu => z.max(0.0),
            ActivationTag::Tanh => z.tanh(),
            ActivationTag::Sigmoid => 1.0 / (1.0 + (-z).exp()),
        }
    }

    /// Derivative; ReLU takes 0 at the kink.
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            ActivationTag::Identity => 1.0,
            ActivationTag::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ActivationTag::Tanh => 1.0 - z.tanh().powi(2),
            ActivationTag::Sigmoid => {
                let s = 1.0 / (1.0 + (-z).exp());
                s * (1.0 - s)
            }
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Parse(format!("unknown activation `{s}`")))
    }
}

/// A thin representation of a network quiver together with one activation
/// per hidden vertex. Sinks are linear; bias sources emit the constant 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuralNetwork {
    weights: ThinRep,
    activations: Vec<ActivationTag>,
    inputs: Vec<VertexId>,
    outputs: Vec<VertexId>,
}

/// Per-vertex activation outputs `a_v` and pre-activations. At sources the
/// pre-activation is the emitted value itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForwardTrace {
    pub a: Vec<f64>,
    pub pre: Vec<f64>,
}

impl NeuralNetwork {
    /// Activations default to the identity at hidden vertices not listed.
    pub fn new(weights: ThinRep, activations: &BTreeMap<String, ActivationTag>) -> Result<Self> {
        let q = weights.quiver().clone();
        let q = if q.is_network() {
            q
        } else {
            let nq = Arc::new(q.as_ref().clone().into_network()?);
            return NeuralNetwork::new(ThinRep::new(nq, weights.weights().to_vec())?, activations);
        };
        let mut acts = vec![ActivationTag::Identity; q.vertex_count()];
        for (name, tag) in activations {
            let v = q.vertex(name)?;
            if !q.is_hidden(v) {
                return Err(Error::NotHidden(name.clone()));
            }
            acts[v.0] = *tag;
        }
        let inputs = q.sources().into_iter().filter(|&v| q.role(v) == Role::Input).collect();
        let outputs = q.sinks();
        Ok(NeuralNetwork {
            weights,
            activations: acts,
            inputs,
            outputs,
        })
    }

    /// Same activation at every hidden vertex.
    pub fn uniform(weights: ThinRep, tag: ActivationTag) -> Result<Self> {
        let q = weights.quiver().clone();
        let acts = q
            .hidden_vertices()
            .into_iter()
            .map(|v| (q.name(v).to_string(), tag))
            .collect();
        NeuralNetwork::new(weights, &acts)
    }

    pub fn from_spec(spec: &NetSpec, quiver: Option<Arc<Quiver>>) -> Result<Self> {
        let q = match (&spec.rep.quiver, quiver) {
            (_, Some(q)) => q,
            (Some(qs), None) => Arc::new(Quiver::from_spec(qs)?),
            (None, None) => return Err(Error::InvalidArgument("network file has no quiver".into())),
        };
        let bias: Vec<&str> = spec.bias.iter().map(String::as_str).collect();
        let q = Arc::new(q.with_bias(&bias)?.into_network()?);
        let weights = ThinRep::from_spec(q, &spec.rep)?;
        NeuralNetwork::new(weights, &spec.activations)
    }

    pub fn to_spec(&self) -> NetSpec {
        let q = self.quiver();
        NetSpec {
            rep: self.weights.to_spec(true),
            activations: q
                .hidden_vertices()
                .into_iter()
                .map(|v| (q.name(v).to_string(), self.activations[v.0]))
                .collect(),
            bias: q
                .sources()
                .into_iter()
                .filter(|&v| q.role(v) == Role::Bias)
                .map(|v| q.name(v).to_string())
                .collect(),
        }
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        self.weights.quiver()
    }

    pub fn weights(&self) -> &ThinRep {
        &self.weights
    }

    pub fn activation(&self, v: VertexId) -> ActivationTag {
        self.activations[v.0]
    }

    /// Input sources in vertex order (bias sources excluded).
    pub fn inputs(&self) -> &[VertexId] {
        &self.inputs
    }

    /// Sinks in vertex order.
    pub fn outputs(&self) -> &[VertexId] {
        &self.outputs
    }

    pub fn with_weights(&self, weights: ThinRep) -> Result<Self> {
        if weights.quiver().as_ref() != self.quiver().as_ref() {
            return Err(Error::QuiverMismatch);
        }
        Ok(NeuralNetwork {
            weights,
            ..self.clone()
        })
    }

    /// Rescales by one scalar per hidden vertex (local order); framed ends stay fixed.
    pub fn act(&self, hidden_gauge: &[f64]) -> Self {
        let g = vertex_gauge(self.quiver(), hidden_gauge);
        NeuralNetwork {
            weights: self.weights.act(&g),
            ..self.clone()
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, ForwardTrace)> {
        if x.len() != self.inputs.len() {
            return Err(Error::InputLength {
                expected: self.inputs.len(),
                found: x.len(),
            });
        }
        let q = self.quiver();
        let n = q.vertex_count();
        let mut a = vec![0.0; n];
        let mut pre = vec![0.0; n];
        for (k, v) in self.inputs.iter().enumerate() {
            a[v.0] = x[k];
        }
        for &v in q.topological_order() {
            if q.is_source(v) {
                if q.role(v) == Role::Bias {
                    a[v.0] = 1.0;
                }
                pre[v.0] = a[v.0];
                continue;
            }
            let z: f64 = q
                .incoming(v)
                .iter()
                .map(|&al| self.weights.weight(al) * a[q.arrow(al).source.0])
                .sum();
            pre[v.0] = z;
            a[v.0] = if q.is_sink(v) { z } else { self.activations[v.0].eval(z) };
        }
        let out = self.outputs.iter().map(|v| a[v.0]).collect();
        Ok((out, ForwardTrace { a, pre }))
    }

    /// `W_x^f`: input arrows scaled by `x`, bias arrows unchanged, arrows
    /// out of a hidden vertex scaled by `a/pre-a`.
    pub fn knowledge_map(&self, x: &[f64]) -> Result<ThinRep> {
        let (_, tr) = self.forward(x)?;
        self.knowledge_from_trace(&tr)
    }

    pub fn knowledge_from_trace(&self, tr: &ForwardTrace) -> Result<ThinRep> {
        let q = self.quiver();
        let mut w = self.weights.clone();
        for (k, ar) in q.arrows().iter().enumerate() {
            let s = ar.source;
            let factor = match q.role(s) {
                Role::Input => tr.a[s.0],
                Role::Bias => 1.0,
                _ => {
                    if tr.pre[s.0].abs() < SINGULAR_PRE_ACTIVATION {
                        return Err(Error::SingularPreActivation(q.name(s).to_string()));
                    }
                    tr.a[s.0] / tr.pre[s.0]
                }
            };
            w.set_weight(crate::quiver::ArrowId(k), self.weights.weights()[k] * factor);
        }
        Ok(w)
    }
}

/// Network file: a representation file plus activations and bias sources.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetSpec {
    #[serde(flatten)]
    pub rep: RepSpec,
    #[serde(default)]
    pub activations: BTreeMap<String, ActivationTag>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bias: Vec<String>,
}

impl NetSpec {
    pub fn quiver_spec(&self) -> Option<&QuiverSpec> {
        self.rep.quiver.as_ref()
    }
}

/// Expands hidden-local scalars to one scalar per vertex, 1 at framed ends.
pub fn vertex_gauge(q: &Quiver, hidden_gauge: &[f64]) -> Vec<f64> {
    let hidden = q.hidden_vertices();
    let mut g = vec![1.0; q.vertex_count()];
    for (k, v) in hidden.iter().enumerate() {
        g[v.0] = hidden_gauge[k];
    }
    g
}

/// `Ψ̂(W)_v` for every vertex: identity activations on the all-ones input.
pub fn psi_hat_vertices(w: &ThinRep) -> Vec<f64> {
    let q = w.quiver();
    let mut a = vec![0.0; q.vertex_count()];
    for &v in q.topological_order() {
        a[v.0] = if q.is_source(v) {
            1.0
        } else {
            q.incoming(v)
                .iter()
                .map(|&al| w.weight(al) * a[q.arrow(al).source.0])
                .sum()
        };
    }
    a
}

/// `Ψ̂(W)`: sink values of [`psi_hat_vertices`], in vertex order.
pub fn psi_hat(w: &ThinRep) -> Vec<f64> {
    let a = psi_hat_vertices(w);
    w.quiver().sinks().iter().map(|v| a[v.0]).collect()
}

/// `Ψ̂` on the moduli point: `(out ∘ q ∘ in)(1, ..., 1)` plus bypass arrows.
pub fn psi_hat_point(m: &ModuliPoint<f64>) -> Vec<f64> {
    let nm = point_network_matrix(m);
    (nm * DVector::from_element(source_width(m.frame()), 1.0)).iter().copied().collect()
}

fn source_width(fr: &FramedQuiver) -> usize {
    fr.quiver.sources().iter().map(|&v| fr.dims.get(v)).sum()
}

fn offsets(fr: &FramedQuiver, vs: &[VertexId]) -> BTreeMap<VertexId, usize> {
    let mut off = 0;
    vs.iter()
        .map(|&v| {
            let o = off;
            off += fr.dims.get(v);
            (v, o)
        })
        .collect()
}

/// `in: ⊕_sources R^{d_s} -> ⊕_i U_i`, copying each source into every slot it feeds.
pub fn in_map(fr: &FramedQuiver) -> DMatrix<f64> {
    let q = &fr.quiver;
    let src = offsets(fr, &q.sources());
    let rows: usize = fr.framing.u.iter().sum();
    let mut m = DMatrix::zeros(rows, source_width(fr));
    let mut r = 0;
    for slots in &fr.framing.in_slots {
        for &a in slots {
            let s = q.arrow(a).source;
            for k in 0..fr.dims.get(s) {
                m[(r + k, src[&s] + k)] = 1.0;
            }
            r += fr.dims.get(s);
        }
    }
    m
}

/// `out: ⊕_j W_j -> ⊕_sinks R^{d_t}`, summing every slot into its sink.
pub fn out_map(fr: &FramedQuiver) -> DMatrix<f64> {
    let q = &fr.quiver;
    let snk = offsets(fr, &q.sinks());
    let cols: usize = fr.framing.w.iter().sum();
    let rows: usize = q.sinks().iter().map(|&v| fr.dims.get(v)).sum();
    let mut m = DMatrix::zeros(rows, cols);
    let mut c = 0;
    for slots in &fr.framing.out_slots {
        for &a in slots {
            let t = q.arrow(a).target;
            for k in 0..fr.dims.get(t) {
                m[(snk[&t] + k, c + k)] = 1.0;
            }
            c += fr.dims.get(t);
        }
    }
    m
}

fn bypass_matrix(fr: &FramedQuiver, bypass: &[DMatrix<f64>]) -> DMatrix<f64> {
    let q = &fr.quiver;
    let src = offsets(fr, &q.sources());
    let snk = offsets(fr, &q.sinks());
    let rows: usize = q.sinks().iter().map(|&v| fr.dims.get(v)).sum();
    let mut m = DMatrix::zeros(rows, source_width(fr));
    for (a, b) in fr.framing.bypass.iter().zip(bypass) {
        let ar = q.arrow(*a);
        let mut view = m.view_mut((snk[&ar.target], src[&ar.source]), b.shape());
        view += b;
    }
    m
}

/// `N_V = out ∘ π(V) ∘ in`, plus source-to-sink arrows, from a moduli point.
pub fn point_network_matrix(m: &ModuliPoint<f64>) -> DMatrix<f64> {
    let fr = m.frame();
    out_map(fr) * m.assembled() * in_map(fr) + bypass_matrix(fr, &m.bypass)
}

pub fn network_matrix(t: &DoubleFramedTriple<f64>) -> Result<DMatrix<f64>> {
    Ok(point_network_matrix(&moduli::project(t)?))
}

/// Identity-activation forward pass on any representation: each source
/// receives its block of `x`, and sinks collect the sum over in-arrows.
pub fn linear_forward(rep: &Representation, x: &DVector<f64>) -> Result<DVector<f64>> {
    let q = rep.quiver();
    let d = rep.dims();
    let width: usize = q.sources().iter().map(|&v| d.get(v)).sum();
    if x.len() != width {
        return Err(Error::InputLength {
            expected: width,
            found: x.len(),
        });
    }
    let mut vals: Vec<DVector<f64>> = q.vertices().map(|v| DVector::zeros(d.get(v))).collect();
    let mut off = 0;
    for v in q.sources() {
        vals[v.0] = x.rows(off, d.get(v)).into_owned();
        off += d.get(v);
    }
    for &v in q.topological_order() {
        if q.is_source(v) {
            continue;
        }
        let mut acc = DVector::zeros(d.get(v));
        for &al in q.incoming(v) {
            acc += rep.map(al) * &vals[q.arrow(al).source.0];
        }
        vals[v.0] = acc;
    }
    let parts: Vec<f64> = q.sinks().iter().flat_map(|v| vals[v.0].iter().copied().collect::<Vec<_>>()).collect();
    Ok(DVector::from_vec(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, D4Symbols};
    use crate::quiver::DimensionVector;
    use crate::random::{random_positive_gauge, random_triple, random_thin, rng};
    use crate::rep::split;
    use rand::Rng;

    fn d4_net(tag: ActivationTag, s: &D4Symbols) -> NeuralNetwork {
        let w = ThinRep::from_rep(&fixtures::d4tilde_rep(s)).unwrap();
        NeuralNetwork::uniform(w, tag).unwrap()
    }

    #[test]
    fn d4_all_ones_output() {
        let n = d4_net(ActivationTag::Identity, &D4Symbols::ones());
        let (out, tr) = n.forward(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(out, vec![9.0, 9.0]);
        assert_eq!(psi_hat(n.weights()), vec![9.0, 9.0]);
        let v3 = n.quiver().vertex("v3").unwrap();
        assert_eq!(tr.pre[v3.0], 4.0);
    }

    #[test]
    fn single_vertex_relu() {
        let w = ThinRep::from_rep(&fixtures::single_vertex_rep(3.0, 2.0)).unwrap();
        let n = NeuralNetwork::uniform(w, ActivationTag::Relu).unwrap();
        for x in [-2.0, -0.5, 0.0, 0.7, 4.0] {
            let (out, _) = n.forward(&[x]).unwrap();
            assert_eq!(out, vec![2.0 * f64::max(3.0 * x, 0.0)]);
        }
    }

    #[test]
    fn zero_weights_zero_output() {
        let n = d4_net(ActivationTag::Tanh, &D4Symbols { a: 0.0, b: 0.0, c: 0.0, d: 0.0, lambda: 0.0, v: [0.0; 2], w: [0.0; 2], phi: [0.0; 2], psi: [0.0; 2] });
        assert_eq!(n.forward(&[1.0, -2.0, 3.0]).unwrap().0, vec![0.0, 0.0]);
    }

    #[test]
    fn input_length_is_checked() {
        let n = d4_net(ActivationTag::Identity, &D4Symbols::ones());
        assert_eq!(
            n.forward(&[1.0]).unwrap_err(),
            Error::InputLength { expected: 3, found: 1 }
        );
    }

    #[test]
    fn d4_in_out_maps() {
        let fr = FramedQuiver::thin(Arc::new(fixtures::d4tilde_quiver()));
        let x = DVector::from_vec(vec![2.0, 3.0, 5.0]);
        assert_eq!((in_map(&fr) * x).as_slice(), &[2.0, 3.0, 2.0, 3.0, 5.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!((out_map(&fr) * y).as_slice(), &[4.0, 6.0]);
    }

    #[test]
    fn d4_network_matrix_closed_form() {
        let mut r = rng(5);
        for _ in 0..20 {
            let s = D4Symbols::random(&mut r);
            let nm = network_matrix(&fixtures::d4tilde_triple(&s)).unwrap();
            let expected = fixtures::d4tilde_network_matrix(&s);
            assert!((nm - &expected).abs().max() <= 1e-12 * expected.abs().max());
        }
    }

    #[test]
    fn network_matrix_matches_linear_forward_non_thin() {
        let mut r = rng(6);
        let q = Arc::new(fixtures::d4tilde_quiver());
        let dims: Vec<usize> = q.vertices().map(|_| r.random_range(1..=3)).collect();
        let fr = Arc::new(FramedQuiver::new(q, DimensionVector(dims)).unwrap());
        let t: DoubleFramedTriple = random_triple(&fr, &mut r);
        let nm = network_matrix(&t).unwrap();
        let rep = t.join();
        for k in 0..nm.ncols() {
            let mut e = DVector::zeros(nm.ncols());
            e[k] = 1.0;
            let col = linear_forward(&rep, &e).unwrap();
            assert!((col - nm.column(k)).abs().max() <= 1e-10 * nm.abs().max());
        }
    }

    #[test]
    fn bypass_arrows_enter_network_matrix() {
        let q = Arc::new(Quiver::new(&["s", "v", "t"], &[("f", "s", "v"), ("h", "v", "t"), ("skip", "s", "t")]).unwrap());
        let w = ThinRep::new(q, vec![2.0, 3.0, 5.0]).unwrap();
        let t = w.triple();
        assert_eq!(network_matrix(&t).unwrap()[(0, 0)], 11.0);
        assert_eq!(psi_hat(&w), vec![11.0]);
        assert_eq!(psi_hat_point(&moduli::project(&t).unwrap()), vec![11.0]);
    }

    #[test]
    fn knowledge_map_cases() {
        let q = Arc::new(
            Quiver::new(
                &["x", "b", "v", "t"],
                &[("p", "x", "v"), ("r", "b", "v"), ("s", "v", "t")],
            )
            .unwrap()
            .with_bias(&["b"])
            .unwrap(),
        );
        let w = ThinRep::new(q, vec![2.0, -5.0, 3.0]).unwrap();
        let n = NeuralNetwork::uniform(w, ActivationTag::Relu).unwrap();
        assert_eq!(n.inputs().len(), 1);
        // pre = 2*1 - 5 < 0: ReLU kills the arrow out of v
        let k = n.knowledge_map(&[1.0]).unwrap();
        assert_eq!(k.weights(), &[2.0, -5.0, 0.0]);
        let k = n.knowledge_map(&[4.0]).unwrap();
        assert_eq!(k.weights(), &[8.0, -5.0, 3.0]);
        assert_eq!(psi_hat(&k), n.forward(&[4.0]).unwrap().0);
        assert!(matches!(n.knowledge_map(&[2.5]), Err(Error::SingularPreActivation(v)) if v == "v"));
    }

    #[test]
    fn knowledge_identity_activation_only_touches_inputs() {
        let mut r = rng(7);
        let s = D4Symbols::random(&mut r);
        let n = d4_net(ActivationTag::Identity, &s);
        let x = [0.3, -1.2, 2.0];
        let k = n.knowledge_map(&x).unwrap();
        let q = n.quiver();
        for (i, ar) in q.arrows().iter().enumerate() {
            let expected = if q.is_source(ar.source) { s.weights()[i] * x[ar.source.0] } else { s.weights()[i] };
            assert!((k.weights()[i] - expected).abs() <= 1e-15);
        }
    }

    #[test]
    fn factorization_through_knowledge() {
        let mut r = rng(8);
        let q = Arc::new(fixtures::d4tilde_quiver());
        for tag in [ActivationTag::Identity, ActivationTag::Relu, ActivationTag::Tanh, ActivationTag::Sigmoid] {
            for _ in 0..30 {
                let n = NeuralNetwork::uniform(random_thin(&q, &mut r), tag).unwrap();
                let x: Vec<f64> = (0..3).map(|_| r.random_range(-2.0..2.0)).collect();
                let Ok(k) = n.knowledge_map(&x) else { continue };
                let (out, tr) = n.forward(&x).unwrap();
                let ph = psi_hat_vertices(&k);
                for v in q.hidden_vertices() {
                    assert!((ph[v.0] - tr.pre[v.0]).abs() <= 1e-12 * (1.0 + tr.pre[v.0].abs()));
                }
                let got = psi_hat(&k);
                let via_point = psi_hat_point(&moduli::project(&k.triple()).unwrap());
                for ((a, b), c) in out.iter().zip(&got).zip(&via_point) {
                    assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
                    assert!((a - c).abs() <= 1e-12 * (1.0 + a.abs()));
                }
            }
        }
    }

    #[test]
    fn relu_positive_gauge_invariance() {
        let mut r = rng(9);
        let q = Arc::new(fixtures::d4tilde_quiver());
        let fr = FramedQuiver::thin(q.clone());
        let n = NeuralNetwork::uniform(random_thin(&q, &mut r), ActivationTag::Relu).unwrap();
        let g = random_positive_gauge(&fr, &mut r);
        let scalars: Vec<f64> = g.blocks.iter().map(|b| b[(0, 0)]).collect();
        let n2 = n.act(&scalars);
        for _ in 0..50 {
            let x: Vec<f64> = (0..3).map(|_| r.random_range(-2.0..2.0)).collect();
            let (a, b) = (n.forward(&x).unwrap().0, n2.forward(&x).unwrap().0);
            for (p, q) in a.iter().zip(&b) {
                assert!((p - q).abs() <= 1e-12 * (1.0 + p.abs()));
            }
        }
    }

    #[test]
    fn thin_act_matches_gauge_action() {
        let mut r = rng(10);
        let q = Arc::new(fixtures::d4tilde_quiver());
        let fr = Arc::new(FramedQuiver::thin(q.clone()));
        let w = random_thin(&q, &mut r);
        let g = random_positive_gauge(&fr, &mut r);
        let scalars: Vec<f64> = g.blocks.iter().map(|b| b[(0, 0)]).collect();
        let via_thin = w.act(&vertex_gauge(&q, &scalars));
        let via_gauge = g.act(&split(&fr, &w.to_rep()).unwrap()).unwrap().join();
        for (a, b) in via_thin.weights().iter().zip(via_gauge.maps()) {
            assert!((a - b[(0, 0)]).abs() <= 1e-14 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn net_spec_roundtrip() {
        let mut r = rng(11);
        let q = Arc::new(fixtures::d4tilde_quiver().with_bias(&["s3"]).unwrap());
        let mut acts = BTreeMap::new();
        acts.insert("v3".to_string(), ActivationTag::Tanh);
        let n = NeuralNetwork::new(random_thin(&q, &mut r), &acts).unwrap();
        let json = serde_json::to_string(&n.to_spec()).unwrap();
        let spec: NetSpec = serde_json::from_str(&json).unwrap();
        let back = NeuralNetwork::from_spec(&spec, None).unwrap();
        assert_eq!(back, n);
        assert_eq!(back.inputs().len(), 2);
    }

    #[test]
    fn activation_parse() {
        assert_eq!(ActivationTag::parse("relu").unwrap(), ActivationTag::Relu);
        assert!(ActivationTag::parse("gelu").is_err());
    }
}
