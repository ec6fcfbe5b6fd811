//! Momentum map `μ(V, f, h)_i = Σ_{α→i} V_α V_α* − Σ_{i→α} V_α* V_α + f_i f_i* − h_i* h_i`,
//! its level sets, and positive rescaling onto a level set.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{frobenius, Scalar};
use crate::rep::{DoubleFramedTriple, FramedQuiver, GaugeElement};

pub const MAX_SWEEPS: usize = 10_000;

/// One `d_i x d_i` Hermitian matrix per hidden vertex.
pub fn momentum<T: Scalar>(t: &DoubleFramedTriple<T>) -> Vec<DMatrix<T>> {
    let fr = &t.frame;
    let mut mu: Vec<DMatrix<T>> = (0..fr.hidden.len())
        .map(|i| &t.f[i] * t.f[i].adjoint() - t.h[i].adjoint() * &t.h[i])
        .collect();
    for (k, &a) in fr.hidden.arrows.iter().enumerate() {
        let (s, tg) = fr.hidden_ends(a);
        let v = &t.arrows[k];
        mu[tg] += v * v.adjoint();
        mu[s] -= v.adjoint() * v;
    }
    mu
}

/// Thin real case: one scalar per hidden vertex.
pub fn thin_momentum(t: &DoubleFramedTriple<f64>) -> Result<Vec<f64>> {
    check_thin(&t.frame)?;
    Ok(momentum(t).iter().map(|m| m[(0, 0)]).collect())
}

fn check_thin(fr: &FramedQuiver) -> Result<()> {
    match (0..fr.hidden.len()).find(|&i| fr.hidden_dim(i) != 1) {
        Some(i) => Err(Error::NotThin(fr.hidden_name(i).to_string())),
        None => Ok(()),
    }
}

/// Which level set: `μ = 0` or `μ = id` at every hidden vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Zero,
    Identity,
}

impl Level {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "0" | "zero" => Ok(Level::Zero),
            "1" | "identity" | "id" => Ok(Level::Identity),
            _ => Err(Error::Parse(format!("level must be 0 or 1, got `{s}`"))),
        }
    }

    fn scalar(self) -> f64 {
        match self {
            Level::Zero => 0.0,
            Level::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Membership {
    pub inside: Vec<bool>,
    /// `‖μ_i − target_i‖_F`.
    pub residuals: Vec<f64>,
}

impl Membership {
    pub fn all(&self) -> bool {
        self.inside.iter().all(|&b| b)
    }
}

pub fn level_set_membership<T: Scalar>(t: &DoubleFramedTriple<T>, level: Level, tol: f64) -> Membership {
    let residuals: Vec<f64> = momentum(t)
        .into_iter()
        .map(|m| {
            let d = m.nrows();
            frobenius(&(m - DMatrix::<T>::identity(d, d) * T::from_real(level.scalar())))
        })
        .collect();
    Membership {
        inside: residuals.iter().map(|&r| r <= tol).collect(),
        residuals,
    }
}

#[derive(Debug, Clone)]
pub struct Balanced {
    /// Positive scalar per hidden vertex.
    pub gauge: Vec<f64>,
    pub triple: DoubleFramedTriple<f64>,
    pub sweeps: usize,
}

/// Gauss–Seidel on positive hidden scalars until `|μ_i − target| ≤ tol`.
///
/// Rescaling vertex `i` by `g` multiplies its in-mass `A` (incoming arrows
/// and `f_i`) by `x = g²` and its out-mass `B` by `1/x`, so each update
/// solves `A x − B / x = c` exactly.
pub fn balance(t: &DoubleFramedTriple<f64>, level: Level, tol: f64) -> Result<Balanced> {
    balance_with_limit(t, level, tol, MAX_SWEEPS)
}

pub fn balance_with_limit(
    t: &DoubleFramedTriple<f64>,
    level: Level,
    tol: f64,
    max_sweeps: usize,
) -> Result<Balanced> {
    let fr = t.frame.clone();
    check_thin(&fr)?;
    let n = fr.hidden.len();
    let c = level.scalar();
    let mut arrows: Vec<f64> = t.arrows.iter().map(|m| m[(0, 0)]).collect();
    let mut f: Vec<DMatrix<f64>> = t.f.clone();
    let mut h: Vec<DMatrix<f64>> = t.h.clone();
    let mut gauge = vec![1.0; n];
    let ends: Vec<(usize, usize)> = fr.hidden.arrows.iter().map(|&a| fr.hidden_ends(a)).collect();

    let residual = |arrows: &[f64], f: &[DMatrix<f64>], h: &[DMatrix<f64>]| -> f64 {
        let mut mu: Vec<f64> = (0..n).map(|i| f[i].norm_squared() - h[i].norm_squared()).collect();
        for (k, &(s, tg)) in ends.iter().enumerate() {
            mu[tg] += arrows[k].powi(2);
            mu[s] -= arrows[k].powi(2);
        }
        mu.iter().fold(0.0f64, |m, x| m.max((x - c).abs()))
    };

    let mut res = residual(&arrows, &f, &h);
    for sweep in 0..=max_sweeps {
        if res <= tol {
            let triple = DoubleFramedTriple::new(
                fr.clone(),
                arrows.iter().map(|&w| DMatrix::from_element(1, 1, w)).collect(),
                f,
                h,
                t.bypass.clone(),
            )?;
            return Ok(Balanced {
                gauge,
                triple,
                sweeps: sweep,
            });
        }
        if sweep == max_sweeps {
            break;
        }
        for &i in fr.hidden.topological_order() {
            let mut a_mass = f[i].norm_squared();
            let mut b_mass = h[i].norm_squared();
            for (k, &(s, tg)) in ends.iter().enumerate() {
                if tg == i {
                    a_mass += arrows[k].powi(2);
                }
                if s == i {
                    b_mass += arrows[k].powi(2);
                }
            }
            let x = match solve_level(a_mass, b_mass, c) {
                Some(x) => x,
                None => return Err(Error::NoConvergence { iterations: sweep, residual: res }),
            };
            let g = x.sqrt();
            gauge[i] *= g;
            f[i] *= g;
            h[i] /= g;
            for (k, &(s, tg)) in ends.iter().enumerate() {
                if tg == i {
                    arrows[k] *= g;
                }
                if s == i {
                    arrows[k] /= g;
                }
            }
        }
        res = residual(&arrows, &f, &h);
        if !res.is_finite() {
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations: max_sweeps,
        residual: res,
    })
}

/// Positive root of `A x − B / x = c`, if any.
fn solve_level(a: f64, b: f64, c: f64) -> Option<f64> {
    let x = if a > 0.0 {
        (c + (c * c + 4.0 * a * b).sqrt()) / (2.0 * a)
    } else if b > 0.0 && c < 0.0 {
        -b / c
    } else if b == 0.0 && c == 0.0 {
        // μ_i is already 0 whatever the scale
        1.0
    } else {
        return None;
    };
    (x > 0.0 && x.is_finite()).then_some(x)
}

/// The balancing gauge as a gauge element.
pub fn gauge_element(frame: &Arc<FramedQuiver>, gauge: &[f64]) -> GaugeElement<f64> {
    GaugeElement {
        blocks: (0..frame.hidden.len())
            .map(|i| DMatrix::identity(frame.hidden_dim(i), frame.hidden_dim(i)) * gauge[i])
            .collect(),
    }
}
