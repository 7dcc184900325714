//! Pseudoinverse least-squares solves with a relative singular-value cutoff.

use super::svd::svd;
use super::Matrix;
use crate::error::{Error, Result};

/// Relative cutoff used when none is given: machine epsilon times σ_max.
pub const DEFAULT_RTOL: f64 = f64::EPSILON;

/// Minimum-norm solution `A⁺B` where singular values of `a` below
/// `rtol·σ_max(a)` are treated as zero.
pub fn lstsq_pinv(a: &Matrix, b: &Matrix, rtol: f64) -> Result<Matrix> {
    if a.rows() != b.rows() {
        return Err(Error::dims(
            "lstsq_pinv",
            format!("A is {}x{}, B is {}x{}", a.rows(), a.cols(), b.rows(), b.cols()),
        ));
    }
    if rtol < 0.0 {
        return Err(Error::Config(format!("negative rtol {rtol}")));
    }
    let s = svd(a)?;
    let sigma_max = s.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = rtol * sigma_max;
    let keep = s
        .singular_values
        .iter()
        .take_while(|&&v| v > cutoff && v > 0.0)
        .count();
    if keep == 0 {
        return Ok(Matrix::zeros(a.cols(), b.cols()));
    }
    // X = V_k · diag(1/σ_k) · U_kᵀ B
    let u = s.u.columns(0, keep);
    let mut utb = u.t_matmul(b);
    for i in 0..keep {
        let inv = 1.0 / s.singular_values[i];
        utb.row_mut(i).iter_mut().for_each(|v| *v *= inv);
    }
    Ok(s.vt.row_range(0, keep).t_matmul(&utb))
}

/// `B·A⁺` for `a` of size k×n and `b` of size p×n, returning p×k.
pub fn right_lstsq_pinv(a: &Matrix, b: &Matrix, rtol: f64) -> Result<Matrix> {
    if a.cols() != b.cols() {
        return Err(Error::dims(
            "right_lstsq_pinv",
            format!("A is {}x{}, B is {}x{}", a.rows(), a.cols(), b.rows(), b.cols()),
        ));
    }
    Ok(lstsq_pinv(&a.transpose(), &b.transpose(), rtol)?.transpose())
}

/// Explicit pseudoinverse with the same cutoff rule.
pub fn pinv(a: &Matrix, rtol: f64) -> Result<Matrix> {
    lstsq_pinv(a, &Matrix::identity(a.rows()), rtol)
}
