//! Sketches of a TT tensor with TT DRMs by left and right contraction sweeps.
//!
//! `L_µ = B_{≤µ}ᵀ C_{≤µ}` (r^L_µ × s_µ) and `R_µ = C_{>µ}ᵀ A_{>µ}` (s_µ × r^R_µ),
//! so that `Ω_µ = L_µ R_µ` and `Ψ_µ = L_{µ−1} C_µ R_µ`.

use super::modes::{Modes, Partial};
use crate::drm::DrmChain;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::tensor::{Core3, TtTensor};

pub(crate) fn require_tt_chains(left: &DrmChain, right: &DrmChain, what: &str) -> Result<()> {
    if left.is_gaussian() || right.is_gaussian() {
        return Err(Error::Unsupported(format!(
            "the {what} kernel needs TT dimension-reduction chains"
        )));
    }
    Ok(())
}

/// `L_{µ−1} · C_µ` as the `(r^L_{µ−1} n_µ) × s_µ` left unfolding.
fn left_times_core(l: &Matrix, c: &Core3) -> Matrix {
    l.matmul(&c.right_unfolding())
        .reshape(l.rows() * c.n(), c.right())
        .expect("reshape keeps size")
}

pub(crate) fn tt_modes(t: &TtTensor, left: &DrmChain, right: &DrmChain, modes: &Modes) -> Result<Partial> {
    require_tt_chains(left, right, "TT")?;
    let d = t.order();
    let mut ls: Vec<Option<Matrix>> = vec![None; d + 1];
    if let Some(max_l) = modes.max_left() {
        let mut l = Matrix::filled(1, 1, 1.0);
        ls[0] = Some(l.clone());
        for mu in 1..=max_l {
            let b = left.tt_core(mu).expect("checked left chain");
            let lc = left_times_core(&l, t.core(mu));
            l = b.left_unfolding().t_matmul(&lc);
            ls[mu] = Some(l.clone());
        }
    }
    let mut rs: Vec<Option<Matrix>> = vec![None; d + 1];
    if let Some(min_r) = modes.min_right() {
        let mut r = Matrix::filled(1, 1, 1.0);
        rs[d] = Some(r.clone());
        for mu in (min_r + 1..=d).rev() {
            let a = right.tt_core(mu).expect("checked right chain");
            let c = t.core(mu);
            let cr = c
                .left_unfolding()
                .matmul(&r)
                .reshape(c.left(), c.n() * a.right())
                .expect("reshape keeps size");
            r = cr.matmul_t(&a.right_unfolding());
            rs[mu - 1] = Some(r.clone());
        }
    }

    let mut out = Partial::empty(d);
    for mu in 1..=d {
        let r = rs[mu].as_ref();
        if modes.psi(mu) {
            let l = ls[mu - 1].as_ref().expect("left sweep covers request");
            let lc = left_times_core(l, t.core(mu));
            let psi = lc.matmul(r.expect("right sweep covers request"));
            out.set_psi(mu, Core3::from_left_unfolding(psi, t.core(mu).n())?);
        }
        if modes.omega(mu) {
            let l = ls[mu].as_ref().expect("left sweep covers request");
            out.set_omega(mu, l.matmul(r.expect("right sweep covers request")));
        }
    }
    Ok(out)
}
