//! Sketches of a CP tensor with TT DRMs.
//!
//! `L_µ = B_{≤µ}ᵀ (V_1 ⊙ ⋯ ⊙ V_µ)` is r^L_µ × N and `R_µ` is N × r^R_µ; then
//! `Ω_µ = L_µ R_µ` and `Ψ_µ[a, i, b] = Σ_j L_{µ−1}[a, j] V_µ[j, i] R_µ[j, b]`.

use super::modes::{Modes, Partial};
use super::tt::require_tt_chains;
use crate::drm::DrmChain;
use crate::error::Result;
use crate::linalg::Matrix;
use crate::tensor::{Core3, CpTensor};

/// `M[j, (i, b)] = V[j, i] · R[j, b]`.
fn row_kron(v: &Matrix, r: &Matrix) -> Matrix {
    let (n_terms, n) = v.shape();
    let w = r.cols();
    let mut m = Matrix::zeros(n_terms, n * w);
    for j in 0..n_terms {
        let rr = r.row(j);
        let dst = m.row_mut(j);
        for (i, &vi) in v.row(j).iter().enumerate() {
            for (b, &rb) in rr.iter().enumerate() {
                dst[i * w + b] = vi * rb;
            }
        }
    }
    m
}

pub(crate) fn cp_modes(t: &CpTensor, left: &DrmChain, right: &DrmChain, modes: &Modes) -> Result<Partial> {
    require_tt_chains(left, right, "CP")?;
    let d = t.shape().order();
    let n_terms = t.n_terms();
    let factors = t.factors();

    let mut ls: Vec<Option<Matrix>> = vec![None; d + 1];
    if let Some(max_l) = modes.max_left() {
        let mut l = Matrix::filled(1, n_terms, 1.0);
        ls[0] = Some(l.clone());
        for mu in 1..=max_l {
            let b = left.tt_core(mu).expect("checked left chain");
            // M[j, (a, i)] = L[a, j] V[j, i], so L_µ = (M B^L)ᵀ.
            let m = row_kron(&l.transpose(), &factors[mu - 1]);
            l = m.matmul(&b.left_unfolding()).transpose();
            ls[mu] = Some(l.clone());
        }
    }
    let mut rs: Vec<Option<Matrix>> = vec![None; d + 1];
    if let Some(min_r) = modes.min_right() {
        let mut r = Matrix::filled(n_terms, 1, 1.0);
        rs[d] = Some(r.clone());
        for mu in (min_r + 1..=d).rev() {
            let a = right.tt_core(mu).expect("checked right chain");
            let m = row_kron(&factors[mu - 1], &r);
            r = m.matmul_t(&a.right_unfolding());
            rs[mu - 1] = Some(r.clone());
        }
    }

    let mut out = Partial::empty(d);
    for mu in 1..=d {
        if modes.psi(mu) {
            let l = ls[mu - 1].as_ref().expect("left sweep covers request");
            let r = rs[mu].as_ref().expect("right sweep covers request");
            let m = row_kron(&factors[mu - 1], r);
            out.set_psi(mu, Core3::from_right_unfolding(l.matmul(&m), factors[mu - 1].cols())?);
        }
        if modes.omega(mu) {
            let l = ls[mu].as_ref().expect("left sweep covers request");
            let r = rs[mu].as_ref().expect("right sweep covers request");
            out.set_omega(mu, l.matmul(r));
        }
    }
    Ok(out)
}
