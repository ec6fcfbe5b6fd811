//! Small dense linear-algebra helpers shared by the moduli and rep layers.
//!
//! Everything here works on `nalgebra::DMatrix` over any [`Scalar`]; matrix
//! sizes are tiny, so every routine goes through a full SVD.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

/// Scalar field of a representation: `f64` or `Complex64`.
pub trait Scalar: ComplexField<RealField = f64> + Copy {}

impl Scalar for f64 {}
impl Scalar for Complex64 {}

/// Thresholds for deciding numerical rank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankTolerance {
    /// Singular values at or below `relative * sigma_max` count as zero.
    pub relative: f64,
    /// Singular values at or below this absolute floor count as zero.
    pub absolute: f64,
}

impl Default for RankTolerance {
    fn default() -> Self {
        RankTolerance {
            relative: 1e-8,
            absolute: 1e-12,
        }
    }
}

impl RankTolerance {
    pub fn relative(relative: f64) -> Self {
        RankTolerance {
            relative,
            ..Default::default()
        }
    }

    fn cutoff(&self, sigma_max: f64) -> f64 {
        (self.relative * sigma_max).max(self.absolute)
    }
}

pub fn singular_values<T: Scalar>(m: &DMatrix<T>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn numerical_rank<T: Scalar>(m: &DMatrix<T>, tol: RankTolerance) -> usize {
    let s = singular_values(m);
    let Some(&max) = s.first() else { return 0 };
    let cut = tol.cutoff(max);
    s.iter().filter(|&&x| x > cut).count()
}

/// Orthonormal basis (as columns) of the column span of `m`.
pub fn column_basis<T: Scalar>(m: &DMatrix<T>, tol: RankTolerance) -> DMatrix<T> {
    let rows = m.nrows();
    if rows == 0 || m.ncols() == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = tol.cutoff(max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > cut)
        .collect();
    DMatrix::from_fn(rows, keep.len(), |r, c| u[(r, keep[c])])
}

/// Orthonormal basis (as columns) of the kernel of `m`.
pub fn null_space<T: Scalar>(m: &DMatrix<T>, tol: RankTolerance) -> DMatrix<T> {
    let cols = m.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    // pad to at least square so that v_t is the full cols x cols factor
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = tol.cutoff(max);
    let null: Vec<usize> = (0..cols)
        .filter(|&k| svd.singular_values[k] <= cut)
        .collect();
    DMatrix::from_fn(cols, null.len(), |r, c| v_t[(null[c], r)].conjugate())
}

/// `I - B B*` for an orthonormal column basis `B`.
pub fn complement_projector<T: Scalar>(basis: &DMatrix<T>) -> DMatrix<T> {
    let n = basis.nrows();
    DMatrix::identity(n, n) - basis * basis.adjoint()
}

/// Horizontal concatenation; all blocks must share the row count `rows`.
pub fn hstack<T: Scalar>(rows: usize, blocks: &[&DMatrix<T>]) -> DMatrix<T> {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut c = 0;
    for b in blocks {
        debug_assert_eq!(b.nrows(), rows);
        out.view_mut((0, c), (rows, b.ncols())).copy_from(*b);
        c += b.ncols();
    }
    out
}

/// Vertical concatenation; all blocks must share the column count `cols`.
pub fn vstack<T: Scalar>(cols: usize, blocks: &[&DMatrix<T>]) -> DMatrix<T> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        debug_assert_eq!(b.ncols(), cols);
        out.view_mut((r, 0), (b.nrows(), cols)).copy_from(*b);
        r += b.nrows();
    }
    out
}

pub fn frobenius<T: Scalar>(m: &DMatrix<T>) -> f64 {
    m.iter().map(|x| x.modulus_squared()).sum::<f64>().sqrt()
}

pub fn max_abs<T: Scalar>(m: &DMatrix<T>) -> f64 {
    m.iter().map(|x| x.modulus()).fold(0.0, f64::max)
}

/// Modulus of the determinant of a square matrix (1 for the empty matrix).
pub fn det_modulus<T: Scalar>(m: &DMatrix<T>) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    m.clone().determinant().modulus()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn rank_of_outer_product_is_one() {
        let m = dmatrix![1.0, 2.0; 2.0, 4.0; 3.0, 6.0];
        assert_eq!(numerical_rank(&m, RankTolerance::default()), 1);
        assert_eq!(numerical_rank(&DMatrix::<f64>::zeros(3, 0), RankTolerance::default()), 0);
        assert_eq!(numerical_rank(&DMatrix::<f64>::zeros(2, 2), RankTolerance::default()), 0);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = dmatrix![1.0, 1.0, 0.0];
        let n = null_space(&m, RankTolerance::default());
        assert_eq!(n.ncols(), 2);
        assert!(max_abs(&(&m * &n)) < 1e-12);
        let gram = n.transpose() * &n;
        assert!(max_abs(&(gram - DMatrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn column_basis_is_orthonormal_span() {
        let m = dmatrix![1.0, 0.0, 1.0; 0.0, 0.0, 0.0; 0.0, 1.0, 1.0];
        let b = column_basis(&m, RankTolerance::default());
        assert_eq!(b.ncols(), 2);
        let p = complement_projector(&b);
        assert!(max_abs(&(p * &m)) < 1e-12);
    }

    #[test]
    fn complex_rank() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[one, i, i, -one]);
        assert_eq!(numerical_rank(&m, RankTolerance::default()), 1);
        assert_eq!(null_space(&m, RankTolerance::default()).ncols(), 1);
    }
}
