//! Sketches of a coordinate-format tensor from the DRM rows its entries select.

use super::modes::{Modes, Partial};
use crate::drm::DrmChain;
use crate::error::Result;
use crate::tensor::{Core3, SparseTensor};

pub(crate) fn sparse_modes(
    t: &SparseTensor,
    left: &DrmChain,
    right: &DrmChain,
    modes: &Modes,
) -> Result<Partial> {
    let d = t.shape().order();
    let nnz = t.nnz();
    let mut index0 = Vec::with_capacity(nnz * d);
    for k in 0..nnz {
        index0.extend_from_slice(t.index0(k));
    }
    let ly = left.gather(&index0, nnz);
    let rx = right.gather(&index0, nnz);
    let values = t.values();

    let mut out = Partial::empty(d);
    for mu in 1..d {
        if modes.omega(mu) {
            let mut w = ly[mu].clone();
            for (j, &e) in values.iter().enumerate() {
                w.row_mut(j).iter_mut().for_each(|v| *v *= e);
            }
            out.set_omega(mu, w.t_matmul(&rx[mu]));
        }
    }
    for mu in 1..=d {
        if !modes.psi(mu) {
            continue;
        }
        let y = &ly[mu - 1];
        let x = &rx[mu];
        let mut psi = Core3::zeros(y.cols(), t.shape().mode(mu), x.cols());
        for (j, &e) in values.iter().enumerate() {
            let l = index0[j * d + mu - 1];
            let xr = x.row(j);
            for (a, &ya) in y.row(j).iter().enumerate() {
                let s = e * ya;
                if s == 0.0 {
                    continue;
                }
                for (b, &xb) in xr.iter().enumerate() {
                    *psi.get_mut(a, l, b) += s * xb;
                }
            }
        }
        out.set_psi(mu, psi);
    }
    Ok(out)
}
