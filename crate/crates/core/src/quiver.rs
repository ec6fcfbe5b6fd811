//! Finite acyclic quivers: validation, source/sink/hidden classification,
//! framing multiplicities and hidden-path enumeration.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default refusal threshold for path enumeration.
pub const DEFAULT_PATH_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ArrowId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Input,
    Bias,
    Output,
    Hidden,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Role::Input => "input",
            Role::Bias => "bias",
            Role::Output => "output",
            Role::Hidden => "hidden",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub id: String,
    pub source: VertexId,
    pub target: VertexId,
}

/// On-disk quiver description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverSpec {
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roles: Option<BTreeMap<String, Role>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub network: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowSpec {
    pub id: String,
    pub from: String,
    pub to: String,
}

impl ArrowSpec {
    pub fn new(id: &str, from: &str, to: &str) -> Self {
        ArrowSpec {
            id: id.to_string(),
            from: from.to_string(),
            to: to.to_string(),
        }
    }
}

/// Partition of the vertex set produced by [`Quiver::classify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub sources: Vec<String>,
    pub sinks: Vec<String>,
    pub hidden: Vec<String>,
    /// Isolated vertices, which are simultaneously sources and sinks.
    pub degenerate: Vec<String>,
    pub components: usize,
}

/// A validated finite acyclic quiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    roles: Vec<Role>,
    network: bool,
    index: HashMap<String, VertexId>,
    arrow_index: HashMap<String, ArrowId>,
    incoming: Vec<Vec<ArrowId>>,
    outgoing: Vec<Vec<ArrowId>>,
    topo: Vec<VertexId>,
}

impl Quiver {
    pub fn from_spec(spec: &QuiverSpec) -> Result<Quiver> {
        let mut index = HashMap::new();
        for (k, v) in spec.vertices.iter().enumerate() {
            if index.insert(v.clone(), VertexId(k)).is_some() {
                return Err(Error::DuplicateVertex(v.clone()));
            }
        }
        let n = spec.vertices.len();
        let mut arrows = Vec::with_capacity(spec.arrows.len());
        let mut arrow_index = HashMap::new();
        let mut incoming = vec![Vec::new(); n];
        let mut outgoing = vec![Vec::new(); n];
        for (k, a) in spec.arrows.iter().enumerate() {
            let lookup = |name: &str| {
                index.get(name).copied().ok_or_else(|| Error::DanglingArrow {
                    arrow: a.id.clone(),
                    vertex: name.to_string(),
                })
            };
            let source = lookup(&a.from)?;
            let target = lookup(&a.to)?;
            if arrow_index.insert(a.id.clone(), ArrowId(k)).is_some() {
                return Err(Error::DuplicateArrowId(a.id.clone()));
            }
            outgoing[source.0].push(ArrowId(k));
            incoming[target.0].push(ArrowId(k));
            arrows.push(Arrow {
                id: a.id.clone(),
                source,
                target,
            });
        }

        let topo = topological_order(n, &arrows, &outgoing)
            .map_err(|v| Error::CyclicQuiver(spec.vertices[v].clone()))?;

        let mut q = Quiver {
            vertices: spec.vertices.clone(),
            arrows,
            roles: Vec::new(),
            network: spec.network,
            index,
            arrow_index,
            incoming,
            outgoing,
            topo,
        };

        q.roles = (0..n)
            .map(|v| {
                let v = VertexId(v);
                if q.is_source(v) {
                    Role::Input
                } else if q.is_sink(v) {
                    Role::Output
                } else {
                    Role::Hidden
                }
            })
            .collect();
        if let Some(roles) = &spec.roles {
            for (name, &role) in roles {
                let v = q.vertex(name)?;
                let ok = match role {
                    Role::Input | Role::Bias => q.is_source(v),
                    Role::Output => q.is_sink(v),
                    Role::Hidden => q.is_hidden(v),
                };
                if !ok {
                    return Err(Error::InvalidRole {
                        vertex: name.clone(),
                        role: role.to_string(),
                    });
                }
                q.roles[v.0] = role;
            }
        }

        if q.network {
            let mut seen = HashMap::new();
            for a in &q.arrows {
                if seen.insert((a.source, a.target), ()).is_some() {
                    return Err(Error::MultipleArrows {
                        from: q.name(a.source).to_string(),
                        to: q.name(a.target).to_string(),
                    });
                }
            }
            if q.component_count() > 1 {
                return Err(Error::DisconnectedNetwork);
            }
        }
        Ok(q)
    }

    /// Convenience constructor from `(id, from, to)` triples.
    pub fn new(vertices: &[&str], arrows: &[(&str, &str, &str)]) -> Result<Quiver> {
        Quiver::from_spec(&QuiverSpec {
            vertices: vertices.iter().map(|s| s.to_string()).collect(),
            arrows: arrows
                .iter()
                .map(|(id, f, t)| ArrowSpec::new(id, f, t))
                .collect(),
            roles: None,
            network: false,
        })
    }

    pub fn to_spec(&self) -> QuiverSpec {
        let defaults: Vec<Role> = (0..self.vertex_count())
            .map(|v| {
                let v = VertexId(v);
                if self.is_source(v) {
                    Role::Input
                } else if self.is_sink(v) {
                    Role::Output
                } else {
                    Role::Hidden
                }
            })
            .collect();
        let custom: BTreeMap<String, Role> = self
            .roles
            .iter()
            .enumerate()
            .filter(|(k, r)| defaults[*k] != **r)
            .map(|(k, r)| (self.vertices[k].clone(), *r))
            .collect();
        QuiverSpec {
            vertices: self.vertices.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| ArrowSpec::new(&a.id, self.name(a.source), self.name(a.target)))
                .collect(),
            roles: (!custom.is_empty()).then_some(custom),
            network: self.network,
        }
    }

    /// Same quiver with the `network` flag set (re-validated).
    pub fn into_network(self) -> Result<Quiver> {
        let mut spec = self.to_spec();
        spec.network = true;
        Quiver::from_spec(&spec)
    }

    /// Same quiver with the given sources marked as bias vertices.
    pub fn with_bias(&self, bias: &[&str]) -> Result<Quiver> {
        let mut spec = self.to_spec();
        let roles = spec.roles.get_or_insert_with(BTreeMap::new);
        for b in bias {
            roles.insert(b.to_string(), Role::Bias);
        }
        Quiver::from_spec(&spec)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, a: ArrowId) -> &Arrow {
        &self.arrows[a.0]
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.vertices[v.0]
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn arrow_id(&self, id: &str) -> Result<ArrowId> {
        self.arrow_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownArrow(id.to_string()))
    }

    pub fn incoming(&self, v: VertexId) -> &[ArrowId] {
        &self.incoming[v.0]
    }

    pub fn outgoing(&self, v: VertexId) -> &[ArrowId] {
        &self.outgoing[v.0]
    }

    pub fn is_source(&self, v: VertexId) -> bool {
        self.incoming[v.0].is_empty()
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        self.outgoing[v.0].is_empty()
    }

    pub fn is_hidden(&self, v: VertexId) -> bool {
        !self.is_source(v) && !self.is_sink(v)
    }

    pub fn role(&self, v: VertexId) -> Role {
        self.roles[v.0]
    }

    pub fn is_network(&self) -> bool {
        self.network
    }

    /// Vertices in a topological order (ties broken by declaration order).
    pub fn topological_order(&self) -> &[VertexId] {
        &self.topo
    }

    pub fn sources(&self) -> Vec<VertexId> {
        self.vertices().filter(|&v| self.is_source(v)).collect()
    }

    pub fn sinks(&self) -> Vec<VertexId> {
        self.vertices().filter(|&v| self.is_sink(v)).collect()
    }

    pub fn hidden_vertices(&self) -> Vec<VertexId> {
        self.vertices().filter(|&v| self.is_hidden(v)).collect()
    }

    pub fn component_count(&self) -> usize {
        let n = self.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut x = x;
            while p[x] != r {
                let next = p[x];
                p[x] = r;
                x = next;
            }
            r
        }
        for a in &self.arrows {
            let (x, y) = (find(&mut parent, a.source.0), find(&mut parent, a.target.0));
            parent[x] = y;
        }
        (0..n).filter(|&v| find(&mut parent, v) == v).count()
    }

    pub fn classify(&self) -> Classification {
        let names = |vs: Vec<VertexId>| vs.into_iter().map(|v| self.name(v).to_string()).collect();
        Classification {
            sources: names(self.sources()),
            sinks: names(self.sinks()),
            hidden: names(self.hidden_vertices()),
            degenerate: names(
                self.vertices()
                    .filter(|&v| self.is_source(v) && self.is_sink(v))
                    .collect(),
            ),
            components: self.component_count(),
        }
    }

    /// The quiver with every arrow reversed.
    pub fn opposite(&self) -> Quiver {
        let mut spec = self.to_spec();
        for a in &mut spec.arrows {
            std::mem::swap(&mut a.from, &mut a.to);
        }
        spec.roles = None;
        spec.network = false;
        Quiver::from_spec(&spec).expect("reversing an acyclic quiver keeps it acyclic")
    }

    pub fn hidden(&self) -> HiddenQuiver {
        HiddenQuiver::new(self)
    }
}

fn topological_order(
    n: usize,
    arrows: &[Arrow],
    outgoing: &[Vec<ArrowId>],
) -> std::result::Result<Vec<VertexId>, usize> {
    let mut indeg = vec![0usize; n];
    for a in arrows {
        indeg[a.target.0] += 1;
    }
    // smallest declared index first keeps the order deterministic
    let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(VertexId(v));
        for &a in &outgoing[v] {
            let t = arrows[a.0].target.0;
            indeg[t] -= 1;
            if indeg[t] == 0 {
                ready.insert(t);
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&v| indeg[v] > 0).unwrap_or(0);
        return Err(stuck);
    }
    Ok(order)
}

pub fn validate(q: &QuiverSpec) -> Result<Classification> {
    Ok(Quiver::from_spec(q)?.classify())
}

/// Full subquiver on the hidden vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HiddenQuiver {
    /// Hidden vertices in declaration order.
    pub vertices: Vec<VertexId>,
    /// Arrows with both ends hidden, in declaration order.
    pub arrows: Vec<ArrowId>,
    local: Vec<Option<usize>>,
    /// Hidden out-arrows per local vertex, sorted by arrow id.
    out_sorted: Vec<Vec<ArrowId>>,
    topo: Vec<usize>,
}

impl HiddenQuiver {
    pub fn new(q: &Quiver) -> HiddenQuiver {
        let vertices = q.hidden_vertices();
        let mut local = vec![None; q.vertex_count()];
        for (k, v) in vertices.iter().enumerate() {
            local[v.0] = Some(k);
        }
        let arrows: Vec<ArrowId> = (0..q.arrow_count())
            .map(ArrowId)
            .filter(|&a| {
                let ar = q.arrow(a);
                local[ar.source.0].is_some() && local[ar.target.0].is_some()
            })
            .collect();
        let mut out_sorted = vec![Vec::new(); vertices.len()];
        for &a in &arrows {
            out_sorted[local[q.arrow(a).source.0].unwrap()].push(a);
        }
        for list in &mut out_sorted {
            list.sort_by(|x, y| q.arrow(*x).id.cmp(&q.arrow(*y).id));
        }
        let topo = q
            .topological_order()
            .iter()
            .filter_map(|v| local[v.0])
            .collect();
        HiddenQuiver {
            vertices,
            arrows,
            local,
            out_sorted,
            topo,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Position of `v` among the hidden vertices.
    pub fn local(&self, v: VertexId) -> Option<usize> {
        self.local.get(v.0).copied().flatten()
    }

    /// Local indices in topological order.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn out_arrows(&self, local: usize) -> &[ArrowId] {
        &self.out_sorted[local]
    }

    /// Hidden adjacency matrix: entry (i, j) counts arrows i -> j.
    pub fn adjacency(&self, q: &Quiver) -> Vec<Vec<u64>> {
        let n = self.len();
        let mut a = vec![vec![0u64; n]; n];
        for &arr in &self.arrows {
            let ar = q.arrow(arr);
            a[self.local[ar.source.0].unwrap()][self.local[ar.target.0].unwrap()] += 1;
        }
        a
    }

    /// Number of paths between every ordered pair of hidden vertices
    /// (lazy paths included), saturating at `u128::MAX`.
    pub fn path_counts(&self, q: &Quiver) -> Vec<Vec<u128>> {
        let n = self.len();
        let mut counts = vec![vec![0u128; n]; n];
        for &i in self.topo.iter().rev() {
            counts[i][i] = 1;
            for &a in &self.out_sorted[i] {
                let m = self.local[q.arrow(a).target.0].unwrap();
                for j in 0..n {
                    counts[i][j] = counts[i][j].saturating_add(counts[m][j]);
                }
            }
        }
        counts
    }

    /// All paths `from ~> to` in lexicographic order of arrow ids.
    pub fn enumerate_paths(
        &self,
        q: &Quiver,
        from: VertexId,
        to: VertexId,
        cap: usize,
    ) -> Result<Vec<Path>> {
        let i = self.local(from).ok_or_else(|| Error::NotHidden(q.name(from).into()))?;
        let j = self.local(to).ok_or_else(|| Error::NotHidden(q.name(to).into()))?;
        let counts = self.path_counts(q);
        if counts[i][j] > cap as u128 {
            return Err(Error::PathExplosion { cap });
        }
        let mut out = Vec::new();
        let mut stack = Vec::new();
        self.dfs(q, &counts, i, j, &mut stack, &mut out);
        Ok(out
            .into_iter()
            .map(|arrows| Path {
                start: from,
                end: to,
                arrows,
            })
            .collect())
    }

    fn dfs(
        &self,
        q: &Quiver,
        counts: &[Vec<u128>],
        at: usize,
        to: usize,
        stack: &mut Vec<ArrowId>,
        out: &mut Vec<Vec<ArrowId>>,
    ) {
        if at == to {
            out.push(stack.clone());
            return;
        }
        for &a in &self.out_sorted[at] {
            let m = self.local[q.arrow(a).target.0].unwrap();
            if counts[m][to] == 0 {
                continue;
            }
            stack.push(a);
            self.dfs(q, counts, m, to, stack, out);
            stack.pop();
        }
    }
}

/// A path in the hidden quiver; the empty arrow list is the lazy path at `start`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub start: VertexId,
    pub end: VertexId,
    /// Arrows in traversal order, starting at `start`.
    pub arrows: Vec<ArrowId>,
}

impl Path {
    pub fn lazy(v: VertexId) -> Path {
        Path {
            start: v,
            end: v,
            arrows: Vec::new(),
        }
    }

    pub fn is_lazy(&self) -> bool {
        self.arrows.is_empty()
    }

    /// `self` followed by `next`; requires `self.end == next.start`.
    pub fn then(&self, next: &Path) -> Path {
        debug_assert_eq!(self.end, next.start);
        let mut arrows = self.arrows.clone();
        arrows.extend_from_slice(&next.arrows);
        Path {
            start: self.start,
            end: next.end,
            arrows,
        }
    }

    pub fn label(&self, q: &Quiver) -> String {
        if self.is_lazy() {
            format!("e_{}", q.name(self.start))
        } else {
            self.arrows
                .iter()
                .map(|a| q.arrow(*a).id.as_str())
                .collect::<Vec<_>>()
                .join("·")
        }
    }
}

/// Dimension vector indexed by [`VertexId`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DimensionVector(pub Vec<usize>);

impl DimensionVector {
    pub fn thin(q: &Quiver) -> DimensionVector {
        DimensionVector(vec![1; q.vertex_count()])
    }

    pub fn from_map(q: &Quiver, map: &BTreeMap<String, usize>, default: usize) -> Result<Self> {
        let mut d = vec![default; q.vertex_count()];
        for (name, &dim) in map {
            d[q.vertex(name)?.0] = dim;
        }
        Ok(DimensionVector(d))
    }

    pub fn to_map(&self, q: &Quiver) -> BTreeMap<String, usize> {
        q.vertices()
            .map(|v| (q.name(v).to_string(), self.0[v.0]))
            .collect()
    }

    pub fn get(&self, v: VertexId) -> usize {
        self.0[v.0]
    }

    pub fn is_thin(&self) -> bool {
        self.0.iter().all(|&d| d == 1)
    }
}

/// Framing multiplicities `u_i`, `w_i` and the arrow slots behind them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramingData {
    /// `u_i` per hidden vertex (local index): dimension-weighted source-arrow count.
    pub u: Vec<usize>,
    /// `w_i` per hidden vertex: dimension-weighted sink-arrow count.
    pub w: Vec<usize>,
    /// Source arrows into each hidden vertex, in declaration order.
    pub in_slots: Vec<Vec<ArrowId>>,
    /// Sink arrows out of each hidden vertex, in declaration order.
    pub out_slots: Vec<Vec<ArrowId>>,
    /// Arrows running directly from a source to a sink.
    pub bypass: Vec<ArrowId>,
}

pub fn framing_data(q: &Quiver, hq: &HiddenQuiver, dims: &DimensionVector) -> Result<FramingData> {
    if dims.0.len() != q.vertex_count() {
        return Err(Error::InvalidArgument(format!(
            "dimension vector has {} entries for {} vertices",
            dims.0.len(),
            q.vertex_count()
        )));
    }
    for v in q.vertices() {
        if (q.is_source(v) || q.is_sink(v)) && dims.get(v) == 0 {
            return Err(Error::ZeroFramedDimension(q.name(v).to_string()));
        }
    }
    let n = hq.len();
    let mut fd = FramingData {
        u: vec![0; n],
        w: vec![0; n],
        in_slots: vec![Vec::new(); n],
        out_slots: vec![Vec::new(); n],
        bypass: Vec::new(),
    };
    for (k, a) in q.arrows().iter().enumerate() {
        let id = ArrowId(k);
        match (hq.local(a.source), hq.local(a.target)) {
            (None, Some(i)) => {
                fd.u[i] += dims.get(a.source);
                fd.in_slots[i].push(id);
            }
            (Some(i), None) => {
                fd.w[i] += dims.get(a.target);
                fd.out_slots[i].push(id);
            }
            (None, None) => fd.bypass.push(id),
            (Some(_), Some(_)) => {}
        }
    }
    Ok(fd)
}
