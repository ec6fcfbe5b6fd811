//! Seeded generators for representations, triples and gauge elements.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::Scalar;
use crate::quiver::Quiver;
use crate::rep::{DoubleFramedTriple, FramedQuiver, GaugeElement, Representation};
use crate::thincat::ThinRep;

pub type QmnRng = ChaCha8Rng;

pub fn rng(seed: u64) -> QmnRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Scalars that can be drawn from a standard Gaussian.
pub trait RandomScalar: Scalar {
    fn gaussian(rng: &mut QmnRng) -> Self;
}

impl RandomScalar for f64 {
    fn gaussian(rng: &mut QmnRng) -> Self {
        rng.sample(StandardNormal)
    }
}

impl RandomScalar for Complex64 {
    fn gaussian(rng: &mut QmnRng) -> Self {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }
}

pub fn random_matrix<T: RandomScalar>(rows: usize, cols: usize, rng: &mut QmnRng) -> DMatrix<T> {
    DMatrix::from_fn(rows, cols, |_, _| T::gaussian(rng))
}

pub fn random_rep<T: RandomScalar>(frame: &FramedQuiver, rng: &mut QmnRng) -> Representation<T> {
    let q = &frame.quiver;
    let maps = q
        .arrows()
        .iter()
        .map(|a| random_matrix(frame.dims.get(a.target), frame.dims.get(a.source), rng))
        .collect();
    Representation::new(q.clone(), frame.dims.clone(), maps).expect("shapes follow the frame")
}

pub fn random_triple<T: RandomScalar>(
    frame: &Arc<FramedQuiver>,
    rng: &mut QmnRng,
) -> DoubleFramedTriple<T> {
    crate::rep::split(frame, &random_rep(frame, rng)).expect("shapes follow the frame")
}

/// Well-conditioned gauge element: `Q₁ diag(s) Q₂` with `|s_k| ∈ [0.5, 2]`.
pub fn random_gauge<T: RandomScalar>(frame: &FramedQuiver, rng: &mut QmnRng) -> GaugeElement<T> {
    let blocks = frame
        .hidden_dims()
        .into_iter()
        .map(|d| {
            if d == 0 {
                return DMatrix::zeros(0, 0);
            }
            let q1 = random_matrix::<T>(d, d, rng).qr().q();
            let q2 = random_matrix::<T>(d, d, rng).qr().q();
            let s = DMatrix::from_fn(d, d, |r, c| {
                if r == c {
                    T::from_real(random_magnitude(rng))
                } else {
                    T::zero()
                }
            });
            q1 * s * q2
        })
        .collect();
    GaugeElement { blocks }
}

/// Gauge with a positive scalar in `[0.5, 2]` at every hidden vertex.
pub fn random_positive_gauge(frame: &FramedQuiver, rng: &mut QmnRng) -> GaugeElement<f64> {
    GaugeElement {
        blocks: frame
            .hidden_dims()
            .into_iter()
            .map(|d| DMatrix::identity(d, d) * random_magnitude(rng))
            .collect(),
    }
}

/// Gauge with a nonzero scalar of random sign at every hidden vertex.
pub fn random_nonzero_gauge(frame: &FramedQuiver, rng: &mut QmnRng) -> GaugeElement<f64> {
    GaugeElement {
        blocks: frame
            .hidden_dims()
            .into_iter()
            .map(|d| {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                DMatrix::identity(d, d) * (sign * random_magnitude(rng))
            })
            .collect(),
    }
}

fn random_magnitude(rng: &mut QmnRng) -> f64 {
    // log-uniform on [0.5, 2]
    let t: f64 = rng.random_range(-1.0..1.0);
    2f64.powf(t)
}

pub fn random_thin(q: &Arc<Quiver>, rng: &mut QmnRng) -> ThinRep {
    let w = (0..q.arrow_count()).map(|_| f64::gaussian(rng)).collect();
    ThinRep::new(q.clone(), w).expect("weight count matches")
}

/// Connected acyclic quiver with vertices `s*`, `h*`, `t*` in that order and
/// no multiple arrows. Every hidden vertex gets an in- and an out-arrow;
/// other forward arrows appear with probability `p`.
pub fn random_network_quiver(
    sources: usize,
    hidden: usize,
    sinks: usize,
    p: f64,
    rng: &mut QmnRng,
) -> Quiver {
    let names: Vec<String> = (0..sources)
        .map(|k| format!("s{k}"))
        .chain((0..hidden).map(|k| format!("h{k}")))
        .chain((0..sinks).map(|k| format!("t{k}")))
        .collect();
    let (h0, t0, n) = (sources, sources + hidden, sources + hidden + sinks);
    loop {
        let mut edges = vec![vec![false; n]; n];
        for j in h0..t0 {
            let forced = rng.random_range(0..j);
            edges[forced][j] = true;
            for i in 0..j {
                if rng.random_bool(p) {
                    edges[i][j] = true;
                }
            }
        }
        for j in t0..n {
            let forced = rng.random_range(h0..t0);
            edges[forced][j] = true;
            for i in h0..t0 {
                if rng.random_bool(p) {
                    edges[i][j] = true;
                }
            }
        }
        for i in 0..t0 {
            if !edges[i].iter().any(|&e| e) {
                let lo = if i < h0 { h0 } else { (i + 1).max(h0) };
                edges[i][rng.random_range(lo..n)] = true;
            }
        }
        // sources feed hidden vertices only
        for i in 0..h0 {
            for j in t0..n {
                edges[i][j] = false;
            }
            if !edges[i].iter().any(|&e| e) {
                edges[i][rng.random_range(h0..t0)] = true;
            }
        }
        let owned: Vec<(String, &str, &str)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| edges[i][j])
            .map(|(i, j)| (format!("{}_{}", names[i], names[j]), names[i].as_str(), names[j].as_str()))
            .collect();
        let arrows: Vec<(&str, &str, &str)> = owned.iter().map(|(a, s, t)| (a.as_str(), *s, *t)).collect();
        let vs: Vec<&str> = names.iter().map(String::as_str).collect();
        let q = Quiver::new(&vs, &arrows).expect("forward arrows only");
        let c = q.classify();
        if c.components == 1 && c.hidden.len() == hidden && c.sources.len() == sources && c.sinks.len() == sinks {
            return q;
        }
    }
}
