//! The three running examples: the linear A₃ quiver, the D̃₄-shaped quiver
//! with framing `u = (2,2,0,0,1)`, `w = (0,0,0,2,2)`, and the single hidden
//! vertex used for ReLU momentum checks.

use std::sync::Arc;

use nalgebra::{dmatrix, DMatrix};

use crate::quiver::{DimensionVector, Quiver};
use crate::random::{QmnRng, RandomScalar};
use crate::rep::{split, DoubleFramedTriple, FramedQuiver, Representation};

/// `i --a--> j --b--> k`.
pub fn a3_quiver() -> Quiver {
    Quiver::new(&["i", "j", "k"], &[("a", "i", "j"), ("b", "j", "k")]).unwrap()
}

pub fn a3_rep(a: f64, b: f64) -> Representation {
    let q = Arc::new(a3_quiver());
    let d = DimensionVector::thin(&q);
    Representation::new(q, d, vec![dmatrix![a], dmatrix![b]]).unwrap()
}

/// Sources `s1, s2, s3`, hidden `v1..v5`, sinks `t1, t2`.
///
/// `v1` and `v2` each receive one arrow from `s1` and from `s2` (framing
/// covectors φ, ψ), `v5` receives λ from `s3`; `a: v1→v3`, `b: v2→v3`,
/// `c: v3→v4`, `d: v3→v5`; `v4` and `v5` feed both sinks (vectors v, w).
pub fn d4tilde_quiver() -> Quiver {
    Quiver::new(
        &["s1", "s2", "s3", "v1", "v2", "v3", "v4", "v5", "t1", "t2"],
        &[
            ("phi1", "s1", "v1"),
            ("phi2", "s2", "v1"),
            ("psi1", "s1", "v2"),
            ("psi2", "s2", "v2"),
            ("a", "v1", "v3"),
            ("b", "v2", "v3"),
            ("c", "v3", "v4"),
            ("d", "v3", "v5"),
            ("lambda", "s3", "v5"),
            ("v_1", "v4", "t1"),
            ("v_2", "v4", "t2"),
            ("w_1", "v5", "t1"),
            ("w_2", "v5", "t2"),
        ],
    )
    .unwrap()
}

/// Scalars of a thin D̃₄ representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D4Symbols {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub lambda: f64,
    pub v: [f64; 2],
    pub w: [f64; 2],
    pub phi: [f64; 2],
    pub psi: [f64; 2],
}

impl D4Symbols {
    pub fn ones() -> Self {
        D4Symbols {
            a: 1.0,
            b: 1.0,
            c: 1.0,
            d: 1.0,
            lambda: 1.0,
            v: [1.0; 2],
            w: [1.0; 2],
            phi: [1.0; 2],
            psi: [1.0; 2],
        }
    }

    pub fn random(rng: &mut QmnRng) -> Self {
        let mut g = || f64::gaussian(rng);
        D4Symbols {
            a: g(),
            b: g(),
            c: g(),
            d: g(),
            lambda: g(),
            v: [g(), g()],
            w: [g(), g()],
            phi: [g(), g()],
            psi: [g(), g()],
        }
    }

    /// Arrow weights in the declaration order of [`d4tilde_quiver`].
    pub fn weights(&self) -> Vec<f64> {
        vec![
            self.phi[0],
            self.phi[1],
            self.psi[0],
            self.psi[1],
            self.a,
            self.b,
            self.c,
            self.d,
            self.lambda,
            self.v[0],
            self.v[1],
            self.w[0],
            self.w[1],
        ]
    }
}

pub fn d4tilde_rep(s: &D4Symbols) -> Representation {
    let q = Arc::new(d4tilde_quiver());
    let d = DimensionVector::thin(&q);
    let maps = s.weights().into_iter().map(|x| dmatrix![x]).collect();
    Representation::new(q, d, maps).unwrap()
}

pub fn d4tilde_triple(s: &D4Symbols) -> DoubleFramedTriple {
    let rep = d4tilde_rep(s);
    let frame = Arc::new(FramedQuiver::thin(rep.quiver().clone()));
    split(&frame, &rep).unwrap()
}

/// Closed form of the assembled quotient map,
/// `[[ac·vφ, bc·vψ, 0], [ad·wφ, bd·wψ, λ·w]]` (4 x 5).
pub fn d4tilde_template(s: &D4Symbols) -> DMatrix<f64> {
    let v = DMatrix::from_column_slice(2, 1, &s.v);
    let w = DMatrix::from_column_slice(2, 1, &s.w);
    let phi = DMatrix::from_row_slice(1, 2, &s.phi);
    let psi = DMatrix::from_row_slice(1, 2, &s.psi);
    let mut m = DMatrix::zeros(4, 5);
    m.view_mut((0, 0), (2, 2)).copy_from(&(&v * &phi * (s.a * s.c)));
    m.view_mut((0, 2), (2, 2)).copy_from(&(&v * &psi * (s.b * s.c)));
    m.view_mut((2, 0), (2, 2)).copy_from(&(&w * &phi * (s.a * s.d)));
    m.view_mut((2, 2), (2, 2)).copy_from(&(&w * &psi * (s.b * s.d)));
    m.view_mut((2, 4), (2, 1)).copy_from(&(&w * s.lambda));
    m
}

/// Closed form of the network matrix `(x₁, x₂, x₃) ↦ (x_t1, x_t2)`, written
/// out entry by entry.
pub fn d4tilde_network_matrix(s: &D4Symbols) -> DMatrix<f64> {
    let (a, b, c, d, l) = (s.a, s.b, s.c, s.d, s.lambda);
    let [v1, v2] = s.v;
    let [w1, w2] = s.w;
    let [p1, p2] = s.phi;
    let [q1, q2] = s.psi;
    DMatrix::from_row_slice(
        2,
        3,
        &[
            a * c * v1 * p1 + b * c * v1 * q1 + a * d * w1 * p1 + b * d * w1 * q1,
            a * c * v1 * p2 + b * c * v1 * q2 + a * d * w1 * p2 + b * d * w1 * q2,
            l * w1,
            a * c * v2 * p1 + b * c * v2 * q1 + a * d * w2 * p1 + b * d * w2 * q1,
            a * c * v2 * p2 + b * c * v2 * q2 + a * d * w2 * p2 + b * d * w2 * q2,
            l * w2,
        ],
    )
}

/// `s --f--> v --h--> t`.
pub fn single_vertex_quiver() -> Quiver {
    Quiver::new(&["s", "v", "t"], &[("f", "s", "v"), ("h", "v", "t")]).unwrap()
}

pub fn single_vertex_rep(f: f64, h: f64) -> Representation {
    let q = Arc::new(single_vertex_quiver());
    let d = DimensionVector::thin(&q);
    Representation::new(q, d, vec![dmatrix![f], dmatrix![h]]).unwrap()
}

pub fn single_vertex_triple(f: f64, h: f64) -> DoubleFramedTriple {
    let rep = single_vertex_rep(f, h);
    let frame = Arc::new(FramedQuiver::thin(rep.quiver().clone()));
    split(&frame, &rep).unwrap()
}

/// Fully connected layers `n{l}_{k}` with the given widths; with `bias`, a
/// bias source `b` feeds every vertex of the first hidden layer.
pub fn mlp_quiver(widths: &[usize], bias: bool) -> Quiver {
    let names: Vec<Vec<String>> = widths
        .iter()
        .enumerate()
        .map(|(l, &w)| (0..w).map(|k| format!("n{l}_{k}")).collect())
        .collect();
    let mut vertices: Vec<String> = names.iter().flatten().cloned().collect();
    let mut arrows = Vec::new();
    for l in 1..widths.len() {
        for s in &names[l - 1] {
            for t in &names[l] {
                arrows.push((format!("{s}>{t}"), s.clone(), t.clone()));
            }
        }
    }
    if bias {
        vertices.push("b".into());
        for t in &names[1] {
            arrows.push((format!("b>{t}"), "b".into(), t.clone()));
        }
    }
    let vs: Vec<&str> = vertices.iter().map(String::as_str).collect();
    let ar: Vec<(&str, &str, &str)> = arrows
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect();
    let q = Quiver::new(&vs, &ar).expect("layered quivers are acyclic");
    if bias {
        q.with_bias(&["b"]).expect("b is a source")
    } else {
        q
    }
}
