//! Incremental sketches after appending column blocks to the chains.
//!
//! With `Y = [Y_old, Y_new]` and `X = [X_old, X_new]` every sketch splits into
//! four blocks. The old pack supplies the `(old, old)` block; the `(all, new)`
//! column and the `(new, old)` row are sketched with the new blocks alone.

use super::modes::Modes;
use super::pack::SketchPack;
use super::sketch_modes;
use crate::drm::DrmChain;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::tensor::{Core3, StructuredTensor, DEFAULT_MATERIALIZATION_CAP};

/// Sketch pack for `new_left`/`new_right` given the pack of their prefixes.
///
/// The old Ψ/Ω are copied unchanged into the top-left blocks; only the new
/// blocks touch `t`.
pub fn sketch_block_extend(
    old: &SketchPack,
    t: &StructuredTensor,
    old_left: &DrmChain,
    old_right: &DrmChain,
    new_left: &DrmChain,
    new_right: &DrmChain,
) -> Result<SketchPack> {
    let fps = (old_left.fingerprint(), old_right.fingerprint());
    if old.fingerprints() != fps {
        return Err(Error::FingerprintMismatch);
    }
    if !old_left.is_prefix_of(new_left) || !old_right.is_prefix_of(new_right) {
        return Err(Error::Config(
            "extended chains are not prefix-stable extensions of the old chains".into(),
        ));
    }
    let (kl, nl) = (old_left.n_blocks(), new_left.n_blocks());
    let (kr, nr) = (old_right.n_blocks(), new_right.n_blocks());
    if kl == nl && kr == nr {
        return Ok(old.clone());
    }

    let d = t.shape().order();
    let modes = Modes::all(d);
    let cap = DEFAULT_MATERIALIZATION_CAP;
    let new_cols = match new_right.block_range(kr, nr) {
        Some(rx) if nr > kr => Some(sketch_modes(t, new_left, &rx, &modes, cap)?),
        _ => None,
    };
    let new_rows = match new_left.block_range(kl, nl) {
        Some(ly) if nl > kl => Some(sketch_modes(t, &ly, old_right, &modes, cap)?),
        _ => None,
    };

    let (lw_old, rw_old) = (old_left.widths(), old_right.widths());
    let (lw, rw) = (new_left.widths(), new_right.widths());

    let mut psi = Vec::with_capacity(d);
    for mu in 1..=d {
        let n = t.shape().mode(mu);
        let mut c = Core3::zeros(lw[mu - 1], n, rw[mu]);
        c.write_block(0, 0, old.psi(mu));
        if let Some(p) = new_cols.as_ref().and_then(|p| p.psi[mu - 1].as_ref()) {
            c.write_block(0, rw_old[mu], p);
        }
        if let Some(p) = new_rows.as_ref().and_then(|p| p.psi[mu - 1].as_ref()) {
            c.write_block(lw_old[mu - 1], 0, p);
        }
        psi.push(c);
    }
    let mut omega = Vec::with_capacity(d - 1);
    for mu in 1..d {
        let mut m = Matrix::zeros(lw[mu], rw[mu]);
        place(&mut m, 0, 0, old.omega(mu));
        if let Some(o) = new_cols.as_ref().and_then(|p| p.omega[mu - 1].as_ref()) {
            place(&mut m, 0, rw_old[mu], o);
        }
        if let Some(o) = new_rows.as_ref().and_then(|p| p.omega[mu - 1].as_ref()) {
            place(&mut m, lw_old[mu], 0, o);
        }
        omega.push(m);
    }
    SketchPack::new(
        t.shape().clone(),
        new_left.ranks()?,
        new_right.ranks()?,
        (new_left.fingerprint(), new_right.fingerprint()),
        psi,
        omega,
    )
}

fn place(dst: &mut Matrix, r0: usize, c0: usize, src: &Matrix) {
    for i in 0..src.rows() {
        dst.row_mut(r0 + i)[c0..c0 + src.cols()].copy_from_slice(src.row(i));
    }
}

/// Floating-point operations of a full sketch of `t` with these chains.
pub fn sketch_flops(t: &StructuredTensor, left: &DrmChain, right: &DrmChain) -> u64 {
    let tt_chains = !left.is_gaussian() && !right.is_gaussian();
    flops(t, left.widths(), right.widths(), tt_chains)
}

/// Floating-point operations of [`sketch_block_extend`]: the new-column and
/// new-row blocks only.
pub fn block_extend_flops(
    t: &StructuredTensor,
    old_left: &DrmChain,
    old_right: &DrmChain,
    new_left: &DrmChain,
    new_right: &DrmChain,
) -> u64 {
    let tt_chains = !new_left.is_gaussian() && !new_right.is_gaussian();
    let diff = |a: &[usize], b: &[usize]| -> Vec<usize> { a.iter().zip(b).map(|(x, y)| x - y).collect() };
    let new_r = diff(new_right.widths(), old_right.widths());
    let new_l = diff(new_left.widths(), old_left.widths());
    let mut total = 0;
    if new_r.iter().any(|&w| w > 0) {
        total += flops(t, new_left.widths(), &new_r, tt_chains);
    }
    if new_l.iter().any(|&w| w > 0) {
        total += flops(t, &new_l, old_right.widths(), tt_chains);
    }
    total
}

fn flops(t: &StructuredTensor, lw: &[usize], rw: &[usize], tt_chains: bool) -> u64 {
    let dims = t.shape().dims();
    let d = dims.len();
    let dense = |dims: &[usize]| -> u64 {
        let numel: u64 = dims.iter().map(|&n| n as u64).product();
        let mut f = 0u64;
        let mut prefix = 1u64;
        for mu in 1..=d {
            prefix *= dims[mu - 1] as u64;
            let (l_prev, l, r) = (lw[mu - 1] as u64, lw[mu] as u64, rw[mu] as u64);
            if mu < d {
                f += 2 * numel * r;
                f += 2 * l * prefix * r;
            }
            f += 2 * l_prev * prefix * r;
        }
        f
    };
    match t {
        StructuredTensor::Dense(_) => dense(dims),
        StructuredTensor::Sparse(s) => {
            let nnz = s.nnz() as u64;
            (1..=d)
                .map(|mu| {
                    let (l_prev, l, r) = (lw[mu - 1] as u64, lw[mu] as u64, rw[mu] as u64);
                    let omega = if mu < d { nnz * l + 2 * nnz * l * r } else { 0 };
                    omega + 2 * nnz * l_prev * r
                })
                .sum()
        }
        StructuredTensor::Tt(x) if tt_chains => {
            let s = |mu: usize| x.core(mu);
            (1..=d)
                .map(|mu| {
                    let c = s(mu);
                    let (sl, n, sr) = (c.left() as u64, c.n() as u64, c.right() as u64);
                    let (l_prev, l, r_prev, r) =
                        (lw[mu - 1] as u64, lw[mu] as u64, rw[mu - 1] as u64, rw[mu] as u64);
                    let sweep_left = 2 * l_prev * sl * n * sr + 2 * l * l_prev * n * sr;
                    let sweep_right = 2 * sl * n * sr * r + 2 * sl * n * r * r_prev;
                    let psi = 2 * l_prev * sl * n * sr + 2 * l_prev * n * sr * r;
                    let omega = if mu < d { 2 * l * sr * r } else { 0 };
                    sweep_left + sweep_right + psi + omega
                })
                .sum()
        }
        StructuredTensor::Cp(x) if tt_chains => {
            let terms = x.n_terms() as u64;
            (1..=d)
                .map(|mu| {
                    let n = dims[mu - 1] as u64;
                    let (l_prev, l, r_prev, r) =
                        (lw[mu - 1] as u64, lw[mu] as u64, rw[mu - 1] as u64, rw[mu] as u64);
                    let sweep_left = terms * l_prev * n + 2 * terms * l_prev * n * l;
                    let sweep_right = terms * n * r + 2 * terms * n * r * r_prev;
                    let psi = terms * n * r + 2 * l_prev * terms * n * r;
                    let omega = if mu < d { 2 * l * terms * r } else { 0 };
                    sweep_left + sweep_right + psi + omega
                })
                .sum()
        }
        StructuredTensor::Tucker(x) if tt_chains => {
            let core_dims = x.core().shape().dims();
            let projection: u64 = (1..=d)
                .map(|mu| {
                    let (n, s) = (dims[mu - 1] as u64, core_dims[mu - 1] as u64);
                    let (l_prev, l, r_prev, r) =
                        (lw[mu - 1] as u64, lw[mu] as u64, rw[mu - 1] as u64, rw[mu] as u64);
                    2 * n * s * (l_prev * l + r_prev * r) + 2 * l_prev * s * n * r
                })
                .sum();
            projection + dense(core_dims)
        }
        StructuredTensor::Sum(members) => members.iter().map(|m| flops(m, lw, rw, tt_chains)).sum(),
        _ => dense(dims),
    }
}
