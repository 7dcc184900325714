//! Sketches of a dense tensor with explicitly materialized DRMs.

use super::modes::{Modes, Partial};
use crate::drm::DrmChain;
use crate::error::Result;
use crate::linalg::Matrix;
use crate::tensor::{Core3, DenseTensor};

/// `Z = T^{≤µ} X_µ` straight from the tensor buffer.
fn unfolding_times(t: &DenseTensor, mu: usize, x: &Matrix) -> Matrix {
    let rows = t.shape().prefix_size(mu);
    let cols = t.shape().suffix_size(mu);
    debug_assert_eq!(x.rows(), cols);
    let mut z = Matrix::zeros(rows, x.cols());
    if x.cols() == 0 {
        return z;
    }
    // SAFETY: the tensor buffer is rows × cols row-major, `x` is cols × r and
    // `z` is rows × r, all contiguous with the strides given.
    unsafe {
        matrixmultiply::dgemm(
            rows,
            cols,
            x.cols(),
            1.0,
            t.values().as_ptr(),
            cols as isize,
            1,
            x.as_slice().as_ptr(),
            x.cols() as isize,
            1,
            0.0,
            z.as_mut_slice().as_mut_ptr(),
            x.cols() as isize,
            1,
        );
    }
    z
}

pub(crate) fn dense_modes(
    t: &DenseTensor,
    left: &DrmChain,
    right: &DrmChain,
    modes: &Modes,
    cap: usize,
) -> Result<Partial> {
    let d = t.shape().order();
    let mut out = Partial::empty(d);
    for mu in modes.right_needed() {
        let x = right.matrix(mu, cap)?;
        let z = unfolding_times(t, mu, &x);
        let n = t.shape().mode(mu);
        if modes.psi(mu) {
            let y = left.matrix(mu - 1, cap)?;
            let zr = z.clone().reshape(y.rows(), n * x.cols())?;
            out.set_psi(mu, Core3::from_right_unfolding(y.t_matmul(&zr), n)?);
        }
        if modes.omega(mu) {
            let y = left.matrix(mu, cap)?;
            out.set_omega(mu, y.t_matmul(&z));
        }
    }
    Ok(out)
}
