//! Randomized low-rank approximation of a single matrix.

use crate::drm::{splitmix64, DrmChain, Side};
use crate::error::{Error, Result};
use crate::linalg::{lstsq_pinv, orth, Matrix, DEFAULT_RTOL};
use crate::tensor::{RankTuple, Shape};

/// `left · right` with `left` m×k and `right` k×n.
#[derive(Clone, Debug, PartialEq)]
pub struct LowRank {
    pub left: Matrix,
    pub right: Matrix,
}

impl LowRank {
    pub fn to_matrix(&self) -> Matrix {
        self.left.matmul(&self.right)
    }

    pub fn rank(&self) -> usize {
        self.left.cols()
    }
}

/// Sketches of the generalized Nyström method.
#[derive(Clone, Debug, PartialEq)]
pub struct GnSketch {
    /// `A X`, m×r.
    pub ax: Matrix,
    /// `Yᵀ A X`, (r+ℓ)×r.
    pub omega: Matrix,
    /// `Yᵀ A`, (r+ℓ)×n.
    pub yta: Matrix,
}

impl GnSketch {
    /// `A X (Yᵀ A X)⁺ Yᵀ A` in factored form.
    pub fn assemble(&self, rtol: f64) -> Result<LowRank> {
        Ok(LowRank {
            left: self.ax.clone(),
            right: lstsq_pinv(&self.omega, &self.yta, rtol)?,
        })
    }
}

const LEFT_STREAM: u64 = 0x4C45_4654_4452_4D53;

/// Hashed Gaussian `X` (n×r) for an m×n matrix.
pub fn right_drm(m: usize, n: usize, r: usize, seed: u64) -> Result<Matrix> {
    let shape = Shape::new(vec![m, n])?;
    DrmChain::gaussian(&shape, &RankTuple::new(vec![r])?, Side::Right, seed)?.matrix(1, usize::MAX)
}

/// Hashed Gaussian `Y` (m×k) for an m×n matrix, independent of [`right_drm`]
/// with the same seed.
pub fn left_drm(m: usize, n: usize, k: usize, seed: u64) -> Result<Matrix> {
    let shape = Shape::new(vec![m, n])?;
    let seed = splitmix64(seed ^ LEFT_STREAM);
    DrmChain::gaussian(&shape, &RankTuple::new(vec![k])?, Side::Left, seed)?.matrix(1, usize::MAX)
}

/// Range finder `Q = orth(A X)` and `B = Qᵀ A`.
pub fn hmt_matrix(a: &Matrix, r: usize, seed: u64) -> Result<LowRank> {
    let (m, n) = a.shape();
    if r == 0 || r > m.min(n) {
        return Err(Error::InvalidRanks(format!("rank {r} for a {m}x{n} matrix")));
    }
    hmt_with(a, &right_drm(m, n, r, seed)?)
}

pub fn hmt_with(a: &Matrix, x: &Matrix) -> Result<LowRank> {
    if x.rows() != a.cols() {
        return Err(Error::dims("hmt_with", format!("X has {} rows, A has {} columns", x.rows(), a.cols())));
    }
    let q = orth(&a.matmul(x));
    let right = q.t_matmul(a);
    Ok(LowRank { left: q, right })
}

/// Generalized Nyström with `X` of rank `r` and `Y` of rank `r + ell`.
pub fn gn_matrix(a: &Matrix, r: usize, ell: usize, seed: u64) -> Result<(GnSketch, LowRank)> {
    let (m, n) = a.shape();
    if r == 0 || r > n || r + ell > m {
        return Err(Error::InvalidRanks(format!(
            "ranks {r} and {} for a {m}x{n} matrix",
            r + ell
        )));
    }
    let x = right_drm(m, n, r, seed)?;
    let y = left_drm(m, n, r + ell, seed)?;
    let sketch = gn_sketch(a, &x, &y)?;
    let approx = sketch.assemble(DEFAULT_RTOL)?;
    Ok((sketch, approx))
}

pub fn gn_sketch(a: &Matrix, x: &Matrix, y: &Matrix) -> Result<GnSketch> {
    if x.rows() != a.cols() || y.rows() != a.rows() {
        return Err(Error::dims("gn_sketch", "DRM rows must match the matrix"));
    }
    let ax = a.matmul(x);
    Ok(GnSketch {
        omega: y.t_matmul(&ax),
        yta: y.t_matmul(a),
        ax,
    })
}
