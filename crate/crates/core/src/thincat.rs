//! Thin representations as a monoidal category: pointwise tensor product,
//! the unit `E`, invertible objects, and network morphisms (vertex scalars
//! equal to 1 at every source and sink).

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::RankTolerance;
use crate::moduli;
use crate::quiver::{DimensionVector, Quiver, VertexId};
use crate::rep::{split, DoubleFramedTriple, FramedQuiver, RepSpec, Representation};

/// Weights below this magnitude count as structural zeros.
pub const ZERO_WEIGHT_TOL: f64 = 1e-12;

/// A representation with every vertex space one-dimensional: one scalar per arrow.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinRep {
    quiver: Arc<Quiver>,
    weights: Vec<f64>,
}

impl ThinRep {
    pub fn new(quiver: Arc<Quiver>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != quiver.arrow_count() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} arrows",
                weights.len(),
                quiver.arrow_count()
            )));
        }
        Ok(ThinRep { quiver, weights })
    }

    pub fn from_rep(rep: &Representation) -> Result<Self> {
        let q = rep.quiver();
        if let Some(v) = q.vertices().find(|&v| rep.dims().get(v) != 1) {
            return Err(Error::NotThin(q.name(v).to_string()));
        }
        ThinRep::new(q.clone(), rep.maps().iter().map(|m| m[(0, 0)]).collect())
    }

    pub fn from_spec(quiver: Arc<Quiver>, spec: &RepSpec) -> Result<Self> {
        ThinRep::from_rep(&Representation::from_spec(quiver, spec)?)
    }

    pub fn to_rep(&self) -> Representation {
        let maps = self.weights.iter().map(|&w| DMatrix::from_element(1, 1, w)).collect();
        Representation::new(self.quiver.clone(), DimensionVector::thin(&self.quiver), maps)
            .expect("thin shapes")
    }

    pub fn to_spec(&self, embed_quiver: bool) -> RepSpec {
        self.to_rep().to_spec(embed_quiver)
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, a: crate::quiver::ArrowId) -> f64 {
        self.weights[a.0]
    }

    pub fn set_weight(&mut self, a: crate::quiver::ArrowId, w: f64) {
        self.weights[a.0] = w;
    }

    pub fn triple(&self) -> DoubleFramedTriple {
        let frame = Arc::new(FramedQuiver::thin(self.quiver.clone()));
        split(&frame, &self.to_rep()).expect("thin shapes")
    }

    /// `W'_α = g_t W_α / g_s` for one scalar per vertex.
    pub fn act(&self, g: &[f64]) -> ThinRep {
        let weights = self
            .quiver
            .arrows()
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| g[a.target.0] * w / g[a.source.0])
            .collect();
        ThinRep {
            quiver: self.quiver.clone(),
            weights,
        }
    }

    pub fn is_semistable(&self, tol: RankTolerance) -> bool {
        moduli::is_semistable(&self.triple(), tol)
    }

    pub fn is_simple(&self, tol: RankTolerance) -> bool {
        moduli::is_simple(&self.triple(), tol)
    }
}

fn same_quiver(a: &ThinRep, b: &ThinRep) -> Result<()> {
    if a.quiver.as_ref() != b.quiver.as_ref() {
        return Err(Error::QuiverMismatch);
    }
    Ok(())
}

/// Pointwise tensor product; in the thin case a weightwise product.
pub fn tensor(a: &ThinRep, b: &ThinRep) -> Result<ThinRep> {
    same_quiver(a, b)?;
    let weights = a.weights.iter().zip(&b.weights).map(|(x, y)| x * y).collect();
    ThinRep::new(a.quiver.clone(), weights)
}

/// The unit `E`: every arrow carries the identity.
pub fn unit(q: &Arc<Quiver>) -> ThinRep {
    ThinRep {
        quiver: q.clone(),
        weights: vec![1.0; q.arrow_count()],
    }
}

pub fn is_invertible(a: &ThinRep) -> bool {
    a.weights.iter().all(|w| w.abs() >= ZERO_WEIGHT_TOL)
}

/// Tensor inverse (reciprocal weights), when every weight is nonzero.
pub fn inverse(a: &ThinRep) -> Option<ThinRep> {
    is_invertible(a).then(|| ThinRep {
        quiver: a.quiver.clone(),
        weights: a.weights.iter().map(|w| 1.0 / w).collect(),
    })
}

/// One scalar `g_v` per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkMorphism {
    pub g: Vec<f64>,
}

impl NetworkMorphism {
    pub fn identity(q: &Quiver) -> Self {
        NetworkMorphism {
            g: vec![1.0; q.vertex_count()],
        }
    }

    pub fn is_iso(&self) -> bool {
        self.g.iter().all(|g| g.abs() >= ZERO_WEIGHT_TOL)
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MorphismCheck {
    pub valid: bool,
    pub iso: bool,
    /// `g_v = 1` at every source and sink.
    pub boundary: bool,
    /// Worst `|g_t a_α - b_α g_s|`.
    pub residual: f64,
}

pub fn check_morphism(g: &NetworkMorphism, a: &ThinRep, b: &ThinRep, tol: f64) -> Result<MorphismCheck> {
    same_quiver(a, b)?;
    let q = &a.quiver;
    if g.g.len() != q.vertex_count() {
        return Err(Error::InvalidArgument("one scalar per vertex".into()));
    }
    let boundary = q
        .vertices()
        .filter(|&v| !q.is_hidden(v))
        .all(|v| (g.g[v.0] - 1.0).abs() <= tol);
    let residual = q
        .arrows()
        .iter()
        .enumerate()
        .map(|(k, ar)| (g.g[ar.target.0] * a.weights[k] - b.weights[k] * g.g[ar.source.0]).abs())
        .fold(0.0, f64::max);
    let scale = a
        .weights
        .iter()
        .chain(&b.weights)
        .fold(1.0f64, |m, w| m.max(w.abs()));
    let valid = boundary && residual <= tol * scale;
    Ok(MorphismCheck {
        valid,
        iso: valid && g.is_iso(),
        boundary,
        residual,
    })
}

/// Solves `g_t a_α = b_α g_s` with `g = 1` at sources and sinks by
/// propagation along arrows. Vertices left free are seeded with 1, falling
/// back to 0 when 1 is inconsistent. Returns `None` when no morphism exists.
pub fn solve_morphism(a: &ThinRep, b: &ThinRep, tol: f64) -> Result<Option<NetworkMorphism>> {
    same_quiver(a, b)?;
    let q = a.quiver.clone();
    let n = q.vertex_count();
    let mut g: Vec<Option<f64>> = (0..n)
        .map(|v| (!q.is_hidden(VertexId(v))).then_some(1.0))
        .collect();
    let zero = |w: f64| w.abs() < ZERO_WEIGHT_TOL;
    // forced zeros
    for (k, ar) in q.arrows().iter().enumerate() {
        let (x, y) = (a.weights[k], b.weights[k]);
        if !zero(x) && zero(y) {
            set(&mut g, ar.target.0, 0.0);
        } else if zero(x) && !zero(y) {
            set(&mut g, ar.source.0, 0.0);
        }
    }
    propagate(&q, a, b, &mut g);
    let free: Vec<usize> = (0..n).filter(|&v| g[v].is_none()).collect();
    for v in free {
        if g[v].is_some() {
            continue;
        }
        let mut trial = g.clone();
        trial[v] = Some(1.0);
        propagate(&q, a, b, &mut trial);
        let candidate = NetworkMorphism {
            g: trial.iter().map(|x| x.unwrap_or(1.0)).collect(),
        };
        if check_morphism(&candidate, a, b, tol)?.valid {
            g = trial;
        } else {
            g[v] = Some(0.0);
            propagate(&q, a, b, &mut g);
        }
    }
    let m = NetworkMorphism {
        g: g.into_iter().map(|x| x.unwrap_or(1.0)).collect(),
    };
    Ok(check_morphism(&m, a, b, tol)?.valid.then_some(m))
}

fn set(g: &mut [Option<f64>], v: usize, x: f64) {
    // a framed end forced to zero stays at 1; the final check rejects it
    if g[v].is_none() {
        g[v] = Some(x);
    }
}

fn propagate(q: &Quiver, a: &ThinRep, b: &ThinRep, g: &mut [Option<f64>]) {
    loop {
        let mut changed = false;
        for (k, ar) in q.arrows().iter().enumerate() {
            let (x, y) = (a.weights[k], b.weights[k]);
            if x.abs() < ZERO_WEIGHT_TOL || y.abs() < ZERO_WEIGHT_TOL {
                continue;
            }
            let (s, t) = (ar.source.0, ar.target.0);
            match (g[s], g[t]) {
                (Some(gs), None) => {
                    g[t] = Some(y * gs / x);
                    changed = true;
                }
                (None, Some(gt)) => {
                    g[s] = Some(x * gt / y);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return;
        }
    }
}
