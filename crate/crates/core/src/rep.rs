//! Representations of a quiver, the hidden gauge group, double-framed
//! triples and the deframed quivers Q′ and Q″.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{self, hstack, vstack, Scalar};
use crate::quiver::{
    framing_data, ArrowId, ArrowSpec, DimensionVector, FramingData, HiddenQuiver, Path, Quiver,
    QuiverSpec, VertexId,
};

/// One matrix per arrow; the matrix of `α: i -> j` has shape `d_j x d_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation<T: Scalar = f64> {
    quiver: Arc<Quiver>,
    dims: DimensionVector,
    maps: Vec<DMatrix<T>>,
}

fn check_shape<T: Scalar>(what: &str, m: &DMatrix<T>, rows: usize, cols: usize) -> Result<()> {
    if m.shape() != (rows, cols) {
        return Err(Error::ShapeMismatch {
            what: what.to_string(),
            expected: (rows, cols),
            found: m.shape(),
        });
    }
    Ok(())
}

impl<T: Scalar> Representation<T> {
    pub fn new(quiver: Arc<Quiver>, dims: DimensionVector, maps: Vec<DMatrix<T>>) -> Result<Self> {
        if dims.0.len() != quiver.vertex_count() {
            return Err(Error::InvalidArgument("dimension vector length".into()));
        }
        if maps.len() != quiver.arrow_count() {
            return Err(Error::InvalidArgument(format!(
                "{} matrices for {} arrows",
                maps.len(),
                quiver.arrow_count()
            )));
        }
        for (a, m) in quiver.arrows().iter().zip(&maps) {
            check_shape(&format!("arrow `{}`", a.id), m, dims.get(a.target), dims.get(a.source))?;
        }
        Ok(Representation { quiver, dims, maps })
    }

    pub fn zero(quiver: Arc<Quiver>, dims: DimensionVector) -> Self {
        let maps = quiver
            .arrows()
            .iter()
            .map(|a| DMatrix::zeros(dims.get(a.target), dims.get(a.source)))
            .collect();
        Representation { quiver, dims, maps }
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn dims(&self) -> &DimensionVector {
        &self.dims
    }

    pub fn map(&self, a: ArrowId) -> &DMatrix<T> {
        &self.maps[a.0]
    }

    pub fn maps(&self) -> &[DMatrix<T>] {
        &self.maps
    }

    pub fn set_map(&mut self, a: ArrowId, m: DMatrix<T>) -> Result<()> {
        let ar = self.quiver.arrow(a);
        check_shape(
            &format!("arrow `{}`", ar.id),
            &m,
            self.dims.get(ar.target),
            self.dims.get(ar.source),
        )?;
        self.maps[a.0] = m;
        Ok(())
    }

    /// `V_ω` for a path given as arrows in traversal order.
    pub fn path_map(&self, path: &Path) -> DMatrix<T> {
        let d = self.dims.get(path.start);
        let mut acc = DMatrix::identity(d, d);
        for &a in &path.arrows {
            acc = &self.maps[a.0] * acc;
        }
        acc
    }

    /// Applies a hidden gauge element through the framed decomposition.
    pub fn act(&self, g: &GaugeElement<T>) -> Result<Self> {
        let frame = Arc::new(FramedQuiver::new(self.quiver.clone(), self.dims.clone())?);
        Ok(g.act(&split(&frame, self)?)?.join())
    }
}

impl Representation<f64> {
    pub fn from_spec(quiver: Arc<Quiver>, spec: &RepSpec) -> Result<Self> {
        let dims = DimensionVector::from_map(&quiver, &spec.dims, 1)?;
        let mut rep = Representation::zero(quiver.clone(), dims);
        for (id, value) in &spec.weights {
            let a = quiver.arrow_id(id)?;
            let m = matrix_from_json(value)
                .ok_or_else(|| Error::Parse(format!("weight of arrow `{id}` is not a matrix")))?;
            let m = if m.shape() == (0, 0) {
                DMatrix::zeros(rep.maps[a.0].nrows(), rep.maps[a.0].ncols())
            } else {
                m
            };
            rep.set_map(a, m)?;
        }
        for (k, a) in quiver.arrows().iter().enumerate() {
            let nonempty = rep.maps[k].nrows() > 0 && rep.maps[k].ncols() > 0;
            if nonempty && !spec.weights.contains_key(&a.id) {
                return Err(Error::Parse(format!("missing weight for arrow `{}`", a.id)));
            }
        }
        Ok(rep)
    }

    pub fn to_spec(&self, embed_quiver: bool) -> RepSpec {
        RepSpec {
            quiver: embed_quiver.then(|| self.quiver.to_spec()),
            dims: self.dims.to_map(&self.quiver),
            weights: self
                .quiver
                .arrows()
                .iter()
                .zip(&self.maps)
                .map(|(a, m)| (a.id.clone(), matrix_to_json(m)))
                .collect(),
        }
    }
}

/// Representation file: `{"dims": {vertex: int}, "weights": {arrow: [[row], ...] | scalar}}`.
/// Missing dims default to 1; the quiver may be embedded under `"quiver"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quiver: Option<QuiverSpec>,
    #[serde(default)]
    pub dims: BTreeMap<String, usize>,
    pub weights: BTreeMap<String, Value>,
}

pub fn matrix_from_json(v: &Value) -> Option<DMatrix<f64>> {
    match v {
        Value::Number(n) => Some(DMatrix::from_element(1, 1, n.as_f64()?)),
        Value::Array(rows) if rows.is_empty() => Some(DMatrix::zeros(0, 0)),
        Value::Array(rows) => {
            let parsed: Option<Vec<Vec<f64>>> = rows
                .iter()
                .map(|r| match r {
                    Value::Array(xs) => xs.iter().map(Value::as_f64).collect(),
                    _ => None,
                })
                .collect();
            let parsed = parsed?;
            let cols = parsed[0].len();
            if parsed.iter().any(|r| r.len() != cols) {
                return None;
            }
            Some(DMatrix::from_fn(parsed.len(), cols, |r, c| parsed[r][c]))
        }
        _ => None,
    }
}

pub fn matrix_to_json(m: &DMatrix<f64>) -> Value {
    if m.shape() == (1, 1) {
        return Value::from(m[(0, 0)]);
    }
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|c| Value::from(m[(r, c)])).collect()))
            .collect(),
    )
}

/// A quiver with a dimension vector, its hidden subquiver and framing data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramedQuiver {
    pub quiver: Arc<Quiver>,
    pub dims: DimensionVector,
    pub hidden: HiddenQuiver,
    pub framing: FramingData,
}

impl FramedQuiver {
    pub fn new(quiver: Arc<Quiver>, dims: DimensionVector) -> Result<Self> {
        let hidden = quiver.hidden();
        let framing = framing_data(&quiver, &hidden, &dims)?;
        Ok(FramedQuiver {
            quiver,
            dims,
            hidden,
            framing,
        })
    }

    pub fn thin(quiver: Arc<Quiver>) -> Self {
        let dims = DimensionVector::thin(&quiver);
        FramedQuiver::new(quiver, dims).expect("thin dimension vectors are positive")
    }

    /// `d_i` for the hidden vertex with local index `i`.
    pub fn hidden_dim(&self, i: usize) -> usize {
        self.dims.get(self.hidden.vertices[i])
    }

    pub fn hidden_dims(&self) -> Vec<usize> {
        (0..self.hidden.len()).map(|i| self.hidden_dim(i)).collect()
    }

    pub fn hidden_name(&self, i: usize) -> &str {
        self.quiver.name(self.hidden.vertices[i])
    }

    /// Local (source, target) of a hidden arrow.
    pub fn hidden_ends(&self, a: ArrowId) -> (usize, usize) {
        let ar = self.quiver.arrow(a);
        (
            self.hidden.local(ar.source).expect("hidden arrow"),
            self.hidden.local(ar.target).expect("hidden arrow"),
        )
    }

    /// `dim R_d(Q) = Σ_α d_s(α) d_t(α)`.
    pub fn rep_space_dim(&self) -> usize {
        self.quiver
            .arrows()
            .iter()
            .map(|a| self.dims.get(a.source) * self.dims.get(a.target))
            .sum()
    }

    /// `dim G_d(Q̃) = Σ_{i hidden} d_i²`.
    pub fn gauge_dim(&self) -> usize {
        self.hidden_dims().iter().map(|d| d * d).sum()
    }
}

/// Hidden representation plus framing maps `f_i: U_i -> V_i` and coframing
/// maps `h_i: V_i -> W_i`. Arrows from a source straight to a sink are kept
/// aside in `bypass`; the gauge group does not touch them.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleFramedTriple<T: Scalar = f64> {
    pub frame: Arc<FramedQuiver>,
    /// One matrix per hidden arrow, in `frame.hidden.arrows` order.
    pub arrows: Vec<DMatrix<T>>,
    /// `f_i`, shape `d_i x u_i`, per hidden vertex.
    pub f: Vec<DMatrix<T>>,
    /// `h_i`, shape `w_i x d_i`, per hidden vertex.
    pub h: Vec<DMatrix<T>>,
    pub bypass: Vec<DMatrix<T>>,
}

impl<T: Scalar> DoubleFramedTriple<T> {
    pub fn new(
        frame: Arc<FramedQuiver>,
        arrows: Vec<DMatrix<T>>,
        f: Vec<DMatrix<T>>,
        h: Vec<DMatrix<T>>,
        bypass: Vec<DMatrix<T>>,
    ) -> Result<Self> {
        let t = DoubleFramedTriple {
            frame,
            arrows,
            f,
            h,
            bypass,
        };
        t.check()?;
        Ok(t)
    }

    pub fn zero(frame: Arc<FramedQuiver>) -> Self {
        let rep = Representation::<T>::zero(frame.quiver.clone(), frame.dims.clone());
        split(&frame, &rep).expect("zero representation has consistent shapes")
    }

    fn check(&self) -> Result<()> {
        let fr = &self.frame;
        let q = &fr.quiver;
        let n = fr.hidden.len();
        if self.arrows.len() != fr.hidden.arrows.len()
            || self.f.len() != n
            || self.h.len() != n
            || self.bypass.len() != fr.framing.bypass.len()
        {
            return Err(Error::InvalidArgument("triple component counts".into()));
        }
        for (k, &a) in fr.hidden.arrows.iter().enumerate() {
            let ar = q.arrow(a);
            check_shape(
                &format!("arrow `{}`", ar.id),
                &self.arrows[k],
                fr.dims.get(ar.target),
                fr.dims.get(ar.source),
            )?;
        }
        for i in 0..n {
            let d = fr.hidden_dim(i);
            check_shape(&format!("f at `{}`", fr.hidden_name(i)), &self.f[i], d, fr.framing.u[i])?;
            check_shape(&format!("h at `{}`", fr.hidden_name(i)), &self.h[i], fr.framing.w[i], d)?;
        }
        for (k, &a) in fr.framing.bypass.iter().enumerate() {
            let ar = q.arrow(a);
            check_shape(
                &format!("arrow `{}`", ar.id),
                &self.bypass[k],
                fr.dims.get(ar.target),
                fr.dims.get(ar.source),
            )?;
        }
        Ok(())
    }

    /// Matrix of the hidden arrow `a`.
    pub fn arrow_map(&self, a: ArrowId) -> &DMatrix<T> {
        let k = self
            .frame
            .hidden
            .arrows
            .iter()
            .position(|&x| x == a)
            .expect("hidden arrow");
        &self.arrows[k]
    }

    /// `V_ω` for a hidden path.
    pub fn path_map(&self, path: &Path) -> DMatrix<T> {
        let d = self.frame.dims.get(path.start);
        let pos: std::collections::HashMap<ArrowId, usize> = self
            .frame
            .hidden
            .arrows
            .iter()
            .enumerate()
            .map(|(k, &a)| (a, k))
            .collect();
        let mut acc = DMatrix::identity(d, d);
        for a in &path.arrows {
            acc = &self.arrows[pos[a]] * acc;
        }
        acc
    }

    pub fn join(&self) -> Representation<T> {
        join(self)
    }
}

/// Collects source arrows into `f_i` (column blocks) and sink arrows into
/// `h_i` (row blocks), both in arrow declaration order.
pub fn split<T: Scalar>(
    frame: &Arc<FramedQuiver>,
    rep: &Representation<T>,
) -> Result<DoubleFramedTriple<T>> {
    if rep.quiver.as_ref() != frame.quiver.as_ref() {
        return Err(Error::QuiverMismatch);
    }
    if rep.dims != frame.dims {
        return Err(Error::InvalidArgument("dimension vector differs from frame".into()));
    }
    let n = frame.hidden.len();
    let arrows = frame.hidden.arrows.iter().map(|a| rep.maps[a.0].clone()).collect();
    let f = (0..n)
        .map(|i| {
            let blocks: Vec<&DMatrix<T>> =
                frame.framing.in_slots[i].iter().map(|a| &rep.maps[a.0]).collect();
            hstack(frame.hidden_dim(i), &blocks)
        })
        .collect();
    let h = (0..n)
        .map(|i| {
            let blocks: Vec<&DMatrix<T>> =
                frame.framing.out_slots[i].iter().map(|a| &rep.maps[a.0]).collect();
            vstack(frame.hidden_dim(i), &blocks)
        })
        .collect();
    let bypass = frame.framing.bypass.iter().map(|a| rep.maps[a.0].clone()).collect();
    DoubleFramedTriple::new(frame.clone(), arrows, f, h, bypass)
}

/// Inverse of [`split`].
pub fn join<T: Scalar>(t: &DoubleFramedTriple<T>) -> Representation<T> {
    let fr = &t.frame;
    let q = &fr.quiver;
    let mut maps: Vec<DMatrix<T>> = vec![DMatrix::zeros(0, 0); q.arrow_count()];
    for (k, a) in fr.hidden.arrows.iter().enumerate() {
        maps[a.0] = t.arrows[k].clone();
    }
    for i in 0..fr.hidden.len() {
        let d = fr.hidden_dim(i);
        let mut col = 0;
        for a in &fr.framing.in_slots[i] {
            let width = fr.dims.get(q.arrow(*a).source);
            maps[a.0] = t.f[i].view((0, col), (d, width)).into_owned();
            col += width;
        }
        let mut row = 0;
        for a in &fr.framing.out_slots[i] {
            let height = fr.dims.get(q.arrow(*a).target);
            maps[a.0] = t.h[i].view((row, 0), (height, d)).into_owned();
            row += height;
        }
    }
    for (k, a) in fr.framing.bypass.iter().enumerate() {
        maps[a.0] = t.bypass[k].clone();
    }
    Representation {
        quiver: q.clone(),
        dims: fr.dims.clone(),
        maps,
    }
}

/// Element of `G_d(Q̃)`: one invertible block per hidden vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeElement<T: Scalar = f64> {
    pub blocks: Vec<DMatrix<T>>,
}

/// `|det g_i| >= GAUGE_DET_TOL * max|g_i|^d_i` is required of every block.
pub const GAUGE_DET_TOL: f64 = 1e-10;

impl<T: Scalar> GaugeElement<T> {
    pub fn identity(frame: &FramedQuiver) -> Self {
        GaugeElement {
            blocks: frame
                .hidden_dims()
                .into_iter()
                .map(|d| DMatrix::identity(d, d))
                .collect(),
        }
    }

    /// `λ · id` at every hidden vertex.
    pub fn scalar(frame: &FramedQuiver, lambda: T) -> Self {
        GaugeElement {
            blocks: frame
                .hidden_dims()
                .into_iter()
                .map(|d| DMatrix::identity(d, d) * lambda)
                .collect(),
        }
    }

    /// Group product `self · other` (apply `other` first).
    pub fn compose(&self, other: &GaugeElement<T>) -> Self {
        GaugeElement {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect(),
        }
    }

    fn inverses(&self, frame: &FramedQuiver) -> Result<Vec<DMatrix<T>>> {
        if self.blocks.len() != frame.hidden.len() {
            return Err(Error::InvalidArgument("gauge has wrong number of blocks".into()));
        }
        self.blocks
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let d = frame.hidden_dim(i);
                check_shape(&format!("gauge at `{}`", frame.hidden_name(i)), g, d, d)?;
                let scale = linalg::max_abs(g).powi(d as i32);
                let det = linalg::det_modulus(g);
                if d > 0 && (scale == 0.0 || det < GAUGE_DET_TOL * scale) {
                    return Err(Error::SingularGauge(frame.hidden_name(i).to_string()));
                }
                g.clone()
                    .try_inverse()
                    .ok_or_else(|| Error::SingularGauge(frame.hidden_name(i).to_string()))
            })
            .collect()
    }

    pub fn inverse(&self, frame: &FramedQuiver) -> Result<Self> {
        Ok(GaugeElement {
            blocks: self.inverses(frame)?,
        })
    }

    /// `V_α ↦ g_t V_α g_s⁻¹`, `f_i ↦ g_i f_i`, `h_i ↦ h_i g_i⁻¹`.
    pub fn act(&self, t: &DoubleFramedTriple<T>) -> Result<DoubleFramedTriple<T>> {
        let fr = &t.frame;
        let inv = self.inverses(fr)?;
        let arrows = fr
            .hidden
            .arrows
            .iter()
            .zip(&t.arrows)
            .map(|(&a, m)| {
                let (s, tg) = fr.hidden_ends(a);
                &self.blocks[tg] * m * &inv[s]
            })
            .collect();
        let f = t.f.iter().zip(&self.blocks).map(|(f, g)| g * f).collect();
        let h = t.h.iter().zip(&inv).map(|(h, gi)| h * gi).collect();
        Ok(DoubleFramedTriple {
            frame: fr.clone(),
            arrows,
            f,
            h,
            bypass: t.bypass.clone(),
        })
    }
}

/// The deframed quiver Q′: hidden quiver plus a vertex ∞ with `u_i` arrows
/// `∞ -> i` and `w_i` arrows `i -> ∞`. It has oriented cycles, so it is kept
/// as a plain multigraph rather than a [`Quiver`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeframedQuiver {
    pub vertices: Vec<String>,
    /// `(id, source, target)` as indices into `vertices`.
    pub arrows: Vec<(String, usize, usize)>,
    pub dims: Vec<usize>,
    /// Index of ∞ in `vertices` (always last).
    pub infinity: usize,
}

pub const INFINITY_VERTEX: &str = "∞";
pub const ZERO_VERTEX: &str = "0";

fn fresh_name(base: &str, taken: &[String]) -> String {
    let mut name = base.to_string();
    while taken.iter().any(|t| *t == name) {
        name.push('\'');
    }
    name
}

pub fn deframe(frame: &FramedQuiver) -> DeframedQuiver {
    let q = &frame.quiver;
    let n = frame.hidden.len();
    let mut vertices: Vec<String> = (0..n).map(|i| frame.hidden_name(i).to_string()).collect();
    let inf = fresh_name(INFINITY_VERTEX, &vertices);
    vertices.push(inf);
    let mut arrows = Vec::new();
    for &a in &frame.hidden.arrows {
        let (s, t) = frame.hidden_ends(a);
        arrows.push((q.arrow(a).id.clone(), s, t));
    }
    for i in 0..n {
        for k in 1..=frame.framing.u[i] {
            arrows.push((format!("beta_{}_{k}", frame.hidden_name(i)), n, i));
        }
    }
    for i in 0..n {
        for l in 1..=frame.framing.w[i] {
            arrows.push((format!("gamma_{}_{l}", frame.hidden_name(i)), i, n));
        }
    }
    let mut dims = frame.hidden_dims();
    dims.push(1);
    DeframedQuiver {
        vertices,
        arrows,
        dims,
        infinity: n,
    }
}

impl DeframedQuiver {
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (_, s, t) in &self.arrows {
            adj[*s].push(*t);
        }
        adj
    }

    fn reachable(&self, from: usize, adj: &[Vec<usize>], within: &[bool]) -> Vec<bool> {
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for &t in &adj[v] {
                if within[t] && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    pub fn has_oriented_cycle(&self) -> bool {
        let adj = self.adjacency();
        let all = vec![true; self.vertices.len()];
        // a cycle exists iff some arrow's target reaches its source
        self.arrows
            .iter()
            .any(|(_, s, t)| self.reachable(*t, &adj, &all)[*s])
    }

    /// Whether the support of the dimension vector is strongly connected.
    pub fn support_strongly_connected(&self) -> bool {
        let within: Vec<bool> = self.dims.iter().map(|&d| d > 0).collect();
        let Some(start) = within.iter().position(|&x| x) else {
            return false;
        };
        let adj = self.adjacency();
        let mut radj = vec![Vec::new(); self.vertices.len()];
        for (_, s, t) in &self.arrows {
            radj[*t].push(*s);
        }
        let fwd = self.reachable(start, &adj, &within);
        let bwd = self.reachable(start, &radj, &within);
        (0..self.vertices.len()).all(|v| !within[v] || (fwd[v] && bwd[v]))
    }

    /// Underlying graph is a single cycle: connected, every vertex of total
    /// degree 2, as many arrows as vertices.
    pub fn is_type_a_tilde(&self) -> bool {
        let n = self.vertices.len();
        if self.arrows.len() != n {
            return false;
        }
        let mut deg = vec![0usize; n];
        for (_, s, t) in &self.arrows {
            deg[*s] += 1;
            deg[*t] += 1;
        }
        if deg.iter().any(|&d| d != 2) {
            return false;
        }
        let mut undirected = vec![Vec::new(); n];
        for (_, s, t) in &self.arrows {
            undirected[*s].push(*t);
            undirected[*t].push(*s);
        }
        let all = vec![true; n];
        self.reachable(0, &undirected, &all).iter().all(|&x| x)
    }

    /// Reads a triple as a Q′-representation: hidden arrows unchanged, the
    /// columns of `f_i` become the vectors on `β_{i,k}` and the rows of `h_i`
    /// the covectors on `γ_{i,l}`. Matrices are listed in `self.arrows` order.
    pub fn representation<T: Scalar>(&self, t: &DoubleFramedTriple<T>) -> Vec<DMatrix<T>> {
        let n = t.frame.hidden.len();
        let mut out: Vec<DMatrix<T>> = t.arrows.clone();
        for i in 0..n {
            for k in 0..t.frame.framing.u[i] {
                out.push(t.f[i].columns(k, 1).into_owned());
            }
        }
        for i in 0..n {
            for l in 0..t.frame.framing.w[i] {
                out.push(t.h[i].rows(l, 1).into_owned());
            }
        }
        out
    }

    /// Inverse of [`DeframedQuiver::representation`] (bypass arrows taken from `like`).
    pub fn triple<T: Scalar>(
        &self,
        like: &DoubleFramedTriple<T>,
        maps: &[DMatrix<T>],
    ) -> Result<DoubleFramedTriple<T>> {
        let fr = &like.frame;
        let n = fr.hidden.len();
        let m = fr.hidden.arrows.len();
        if maps.len() != self.arrows.len() {
            return Err(Error::InvalidArgument("Q′ representation arrow count".into()));
        }
        let arrows = maps[..m].to_vec();
        let mut k = m;
        let mut f = Vec::with_capacity(n);
        for i in 0..n {
            let cols: Vec<&DMatrix<T>> = maps[k..k + fr.framing.u[i]].iter().collect();
            f.push(hstack(fr.hidden_dim(i), &cols));
            k += fr.framing.u[i];
        }
        let mut h = Vec::with_capacity(n);
        for i in 0..n {
            let rows: Vec<&DMatrix<T>> = maps[k..k + fr.framing.w[i]].iter().collect();
            h.push(vstack(fr.hidden_dim(i), &rows));
            k += fr.framing.w[i];
        }
        DoubleFramedTriple::new(fr.clone(), arrows, f, h, like.bypass.clone())
    }

    /// The extra `C*` factor of `G_d′(Q′)`: `v ↦ λ⁻¹ v`, `φ ↦ λ φ`.
    pub fn rescale_infinity<T: Scalar>(&self, maps: &[DMatrix<T>], lambda: T) -> Vec<DMatrix<T>> {
        let inv = T::one() / lambda;
        self.arrows
            .iter()
            .zip(maps)
            .map(|((_, s, t), m)| {
                if *s == self.infinity {
                    m * inv
                } else if *t == self.infinity {
                    m * lambda
                } else {
                    m.clone()
                }
            })
            .collect()
    }
}

/// The variant Q″ with separate framing vertex 0 and coframing vertex ∞.
#[derive(Debug, Clone)]
pub struct DoubleFramedVariant {
    pub quiver: Quiver,
    pub dims: DimensionVector,
    /// `dim R_d(Q) - dim G_d(Q̃) - 1`.
    pub expected_dim: i64,
}

pub fn doubleframe_variant(frame: &FramedQuiver) -> DoubleFramedVariant {
    let q = &frame.quiver;
    let n = frame.hidden.len();
    let mut vertices: Vec<String> = (0..n).map(|i| frame.hidden_name(i).to_string()).collect();
    let zero = fresh_name(ZERO_VERTEX, &vertices);
    vertices.push(zero.clone());
    let inf = fresh_name(INFINITY_VERTEX, &vertices);
    vertices.push(inf.clone());
    let mut arrows: Vec<ArrowSpec> = frame
        .hidden
        .arrows
        .iter()
        .map(|&a| {
            let ar = q.arrow(a);
            ArrowSpec::new(&ar.id, q.name(ar.source), q.name(ar.target))
        })
        .collect();
    for i in 0..n {
        for k in 1..=frame.framing.u[i] {
            let name = frame.hidden_name(i);
            arrows.push(ArrowSpec::new(&format!("beta_{name}_{k}"), &zero, name));
        }
    }
    for i in 0..n {
        for l in 1..=frame.framing.w[i] {
            let name = frame.hidden_name(i);
            arrows.push(ArrowSpec::new(&format!("gamma_{name}_{l}"), name, &inf));
        }
    }
    let quiver = Quiver::from_spec(&QuiverSpec {
        vertices,
        arrows,
        roles: None,
        network: false,
    })
    .expect("Q″ is acyclic");
    let mut d = frame.hidden_dims();
    d.extend([1, 1]);
    let expected_dim = frame.rep_space_dim() as i64 - frame.gauge_dim() as i64 - 1;
    DoubleFramedVariant {
        quiver,
        dims: DimensionVector(d),
        expected_dim,
    }
}

/// Local index of a hidden vertex by name.
pub fn hidden_index(frame: &FramedQuiver, name: &str) -> Result<usize> {
    let v: VertexId = frame.quiver.vertex(name)?;
    frame
        .hidden
        .local(v)
        .ok_or_else(|| Error::NotHidden(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::random::{random_gauge, random_triple, rng};
    use nalgebra::dmatrix;

    fn rel_err(a: &DoubleFramedTriple, b: &DoubleFramedTriple) -> f64 {
        let ra = a.join();
        let rb = b.join();
        let num: f64 = ra
            .maps()
            .iter()
            .zip(rb.maps())
            .map(|(x, y)| linalg::frobenius(&(x - y)).powi(2))
            .sum();
        let den: f64 = ra.maps().iter().map(|x| linalg::frobenius(x).powi(2)).sum();
        (num / den.max(1e-300)).sqrt()
    }

    #[test]
    fn d4_split_shapes() {
        let t = fixtures::d4tilde_triple(&fixtures::D4Symbols::ones());
        let fr = &t.frame;
        let shapes: Vec<_> = t.f.iter().map(|m| m.shape()).collect();
        assert_eq!(shapes, vec![(1, 2), (1, 2), (1, 0), (1, 0), (1, 1)]);
        let shapes: Vec<_> = t.h.iter().map(|m| m.shape()).collect();
        assert_eq!(shapes, vec![(0, 1), (0, 1), (0, 1), (2, 1), (2, 1)]);
        assert_eq!(t.arrows.len(), 4);
        assert_eq!(t.join().maps().len(), 13);
        assert_eq!(fr.rep_space_dim(), 13);
    }

    #[test]
    fn a3_split() {
        let q = Arc::new(fixtures::a3_quiver());
        let rep = fixtures::a3_rep(2.0, 3.0);
        let fr = Arc::new(FramedQuiver::thin(q));
        let t = split(&fr, &rep).unwrap();
        assert!(t.arrows.is_empty());
        assert_eq!(t.f[0], dmatrix![2.0]);
        assert_eq!(t.h[0], dmatrix![3.0]);
    }

    #[test]
    fn split_join_roundtrip_is_exact() {
        let mut r = rng(11);
        let q = Arc::new(fixtures::d4tilde_quiver());
        let mut d = DimensionVector::thin(&q);
        d.0[q.vertex("v3").unwrap().0] = 2;
        d.0[q.vertex("s2").unwrap().0] = 3;
        let fr = Arc::new(FramedQuiver::new(q, d).unwrap());
        for _ in 0..100 {
            let t: DoubleFramedTriple = random_triple(&fr, &mut r);
            let back = split(&fr, &t.join()).unwrap();
            assert_eq!(back, t);
        }
    }

    #[test]
    fn bypass_arrows_survive_roundtrip() {
        let q = Arc::new(
            Quiver::new(&["s", "h", "t"], &[("a", "s", "h"), ("b", "h", "t"), ("skip", "s", "t")])
                .unwrap(),
        );
        let fr = Arc::new(FramedQuiver::thin(q.clone()));
        assert_eq!(fr.framing.bypass.len(), 1);
        let rep = Representation::new(
            q,
            fr.dims.clone(),
            vec![dmatrix![1.0], dmatrix![2.0], dmatrix![5.0]],
        )
        .unwrap();
        let t = split(&fr, &rep).unwrap();
        assert_eq!(t.bypass[0], dmatrix![5.0]);
        assert_eq!(t.join(), rep);
    }

    #[test]
    fn empty_hidden_quiver() {
        let q = Arc::new(Quiver::new(&["s", "t"], &[("a", "s", "t")]).unwrap());
        let fr = Arc::new(FramedQuiver::thin(q.clone()));
        let rep = Representation::new(q, fr.dims.clone(), vec![dmatrix![4.0]]).unwrap();
        let t = split(&fr, &rep).unwrap();
        assert!(t.f.is_empty() && t.arrows.is_empty());
        assert_eq!(t.join(), rep);
    }

    #[test]
    fn shape_mismatch_reported() {
        let q = Arc::new(fixtures::a3_quiver());
        let err = Representation::new(
            q.clone(),
            DimensionVector::thin(&q),
            vec![dmatrix![1.0, 2.0], dmatrix![1.0]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { .. }));
    }

    #[test]
    fn identity_gauge_is_unit() {
        let mut r = rng(3);
        let fr = Arc::new(FramedQuiver::thin(Arc::new(fixtures::d4tilde_quiver())));
        let t: DoubleFramedTriple = random_triple(&fr, &mut r);
        assert_eq!(GaugeElement::identity(&fr).act(&t).unwrap(), t);
    }

    #[test]
    fn a3_gauge_example() {
        let fr = Arc::new(FramedQuiver::thin(Arc::new(fixtures::a3_quiver())));
        let t = split(&fr, &fixtures::a3_rep(3.0, 5.0)).unwrap();
        let g = GaugeElement::scalar(&fr, 2.0);
        let gt = g.act(&t).unwrap();
        assert_eq!(gt.f[0], dmatrix![6.0]);
        assert_eq!(gt.h[0], dmatrix![2.5]);
    }

    #[test]
    fn action_is_compatible_with_product() {
        let mut r = rng(5);
        let q = Arc::new(fixtures::d4tilde_quiver());
        let mut d = DimensionVector::thin(&q);
        for v in ["v1", "v3", "v5"] {
            d.0[q.vertex(v).unwrap().0] = 2;
        }
        let fr = Arc::new(FramedQuiver::new(q, d).unwrap());
        for _ in 0..50 {
            let t: DoubleFramedTriple = random_triple(&fr, &mut r);
            let g = random_gauge(&fr, &mut r);
            let h = random_gauge(&fr, &mut r);
            let lhs = g.act(&h.act(&t).unwrap()).unwrap();
            let rhs = g.compose(&h).act(&t).unwrap();
            assert!(rel_err(&lhs, &rhs) <= 1e-12, "{}", rel_err(&lhs, &rhs));
        }
    }

    #[test]
    fn singular_gauge_rejected() {
        let fr = Arc::new(FramedQuiver::thin(Arc::new(fixtures::a3_quiver())));
        let t = split(&fr, &fixtures::a3_rep(1.0, 1.0)).unwrap();
        let g = GaugeElement::scalar(&fr, 0.0);
        assert_eq!(g.act(&t).unwrap_err(), Error::SingularGauge("j".into()));
        let g = GaugeElement {
            blocks: vec![dmatrix![1.0]; 1],
        };
        assert!(g.act(&t).is_ok());
        let two = Arc::new(
            FramedQuiver::new(
                fr.quiver.clone(),
                DimensionVector(vec![1, 2, 1]),
            )
            .unwrap(),
        );
        let t2 = DoubleFramedTriple::<f64>::zero(two);
        let g = GaugeElement {
            blocks: vec![dmatrix![1.0, 1.0; 1.0, 1.0 + 1e-13]],
        };
        assert!(matches!(g.act(&t2), Err(Error::SingularGauge(_))));
    }

    #[test]
    fn scalar_rescaling_at_infinity_is_a_gauge() {
        let mut r = rng(8);
        let q = Arc::new(fixtures::d4tilde_quiver());
        let mut d = DimensionVector::thin(&q);
        d.0[q.vertex("v3").unwrap().0] = 2;
        let fr = Arc::new(FramedQuiver::new(q, d).unwrap());
        let qp = deframe(&fr);
        for lambda in [2.0, -0.5, 7.25] {
            let t: DoubleFramedTriple = random_triple(&fr, &mut r);
            let rescaled = qp.rescale_infinity(&qp.representation(&t), lambda);
            let via_infinity = qp.triple(&t, &rescaled).unwrap();
            let via_gauge = GaugeElement::scalar(&fr, 1.0 / lambda).act(&t).unwrap();
            assert!(rel_err(&via_infinity, &via_gauge) <= 1e-12);
        }
    }

    #[test]
    fn deframed_roundtrip() {
        let mut r = rng(9);
        let fr = Arc::new(FramedQuiver::thin(Arc::new(fixtures::d4tilde_quiver())));
        let qp = deframe(&fr);
        let t: DoubleFramedTriple = random_triple(&fr, &mut r);
        assert_eq!(qp.triple(&t, &qp.representation(&t)).unwrap(), t);
    }

    #[test]
    fn a3_deframed_is_two_cycle() {
        let fr = FramedQuiver::thin(Arc::new(fixtures::a3_quiver()));
        let qp = deframe(&fr);
        assert_eq!(qp.vertices, vec!["j", "∞"]);
        assert_eq!(qp.arrows.len(), 2);
        assert!(qp.arrows.iter().any(|(_, s, t)| (*s, *t) == (1, 0)));
        assert!(qp.arrows.iter().any(|(_, s, t)| (*s, *t) == (0, 1)));
        assert!(qp.is_type_a_tilde());
        assert!(qp.has_oriented_cycle());
    }

    #[test]
    fn d4_deframed_counts() {
        let fr = FramedQuiver::thin(Arc::new(fixtures::d4tilde_quiver()));
        let qp = deframe(&fr);
        assert_eq!(qp.vertices.len(), 6);
        let into: Vec<&str> = qp
            .arrows
            .iter()
            .filter(|(_, s, _)| *s == qp.infinity)
            .map(|(_, _, t)| qp.vertices[*t].as_str())
            .collect();
        assert_eq!(into, vec!["v1", "v1", "v2", "v2", "v5"]);
        let out: Vec<&str> = qp
            .arrows
            .iter()
            .filter(|(_, _, t)| *t == qp.infinity)
            .map(|(_, s, _)| qp.vertices[*s].as_str())
            .collect();
        assert_eq!(out, vec!["v4", "v4", "v5", "v5"]);
        assert_eq!(qp.arrows.len(), 13);
        assert!(qp.has_oriented_cycle());
        assert!(!qp.is_type_a_tilde());
        assert!(qp.support_strongly_connected());
    }

    #[test]
    fn empty_framing_leaves_infinity_isolated() {
        // all u_i = w_i = 0 forces an empty hidden quiver: Q′ is just ∞
        let q = Arc::new(Quiver::new(&["s", "t"], &[("a", "s", "t")]).unwrap());
        let qp = deframe(&FramedQuiver::thin(q));
        assert_eq!(qp.vertices, vec!["∞"]);
        assert!(qp.arrows.is_empty());
        assert!(!qp.has_oriented_cycle());
        assert!(!qp.is_type_a_tilde());
    }

    #[test]
    fn q_double_prime() {
        let a3 = FramedQuiver::thin(Arc::new(fixtures::a3_quiver()));
        let v = doubleframe_variant(&a3);
        assert_eq!(v.expected_dim, 0);
        assert_eq!(v.quiver.arrow_count(), 2);
        let c = v.quiver.classify();
        assert_eq!(c.sources, vec!["0"]);
        assert_eq!(c.sinks, vec!["∞"]);
        assert_eq!(c.hidden, vec!["j"]);
        assert_eq!(a3.rep_space_dim() as i64 - a3.gauge_dim() as i64, 1);

        let d4 = FramedQuiver::thin(Arc::new(fixtures::d4tilde_quiver()));
        assert_eq!(doubleframe_variant(&d4).expected_dim, 7);
    }

    #[test]
    fn rep_file_roundtrip() {
        let rep = fixtures::d4tilde_triple(&fixtures::D4Symbols::ones()).join();
        let spec = rep.to_spec(true);
        let json = serde_json::to_string(&spec).unwrap();
        let back: RepSpec = serde_json::from_str(&json).unwrap();
        let q = Arc::new(Quiver::from_spec(back.quiver.as_ref().unwrap()).unwrap());
        assert_eq!(Representation::from_spec(q, &back).unwrap(), rep);
    }
}
