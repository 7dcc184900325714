//! Two-sided sketching of structured tensors and TT assembly from sketches.
//!
//! For a left chain `Y_µ` and a right chain `X_µ` the sketches are
//! `Ψ_µ = (Y_{µ−1}ᵀ ⊗ I) T^{≤µ} X_µ` and `Ω_µ = Y_µᵀ T^{≤µ} X_µ`. They are
//! linear in `T`, so summands can be sketched independently and added.

mod assemble;
mod block;
mod config;
mod cp;
mod dense;
mod modes;
mod pack;
mod sparse;
mod tt;
mod tucker;

pub use assemble::{assemble, assemble_pack};
pub use block::{block_extend_flops, sketch_block_extend, sketch_flops};
pub use config::{Orientation, Oversampling, SttaConfig};
pub use pack::SketchPack;
pub(crate) use modes::{Modes, Partial};

use rayon::prelude::*;

use crate::drm::DrmChain;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::tensor::{
    Core3, CpTensor, DenseTensor, SparseTensor, StructuredTensor, TtTensor, TuckerTensor,
    DEFAULT_MATERIALIZATION_CAP,
};

/// Compute the requested sketches, dispatching on the representation.
///
/// TT, CP and Tucker inputs use their contraction kernels when both chains
/// are TT chains and are otherwise materialized under `cap`.
pub(crate) fn sketch_modes(
    t: &StructuredTensor,
    left: &DrmChain,
    right: &DrmChain,
    modes: &Modes,
    cap: usize,
) -> Result<Partial> {
    modes.check_chains(t.shape(), left, right)?;
    let structured = !left.is_gaussian() && !right.is_gaussian();
    match t {
        StructuredTensor::Dense(d) => dense::dense_modes(d, left, right, modes, cap),
        StructuredTensor::Sparse(s) => sparse::sparse_modes(s, left, right, modes),
        StructuredTensor::Tt(x) if structured => tt::tt_modes(x, left, right, modes),
        StructuredTensor::Cp(x) if structured => cp::cp_modes(x, left, right, modes),
        StructuredTensor::Tucker(x) if structured => tucker::tucker_modes(x, left, right, modes, cap),
        StructuredTensor::Sum(members) => {
            let parts: Vec<Partial> = members
                .par_iter()
                .map(|m| sketch_modes(m, left, right, modes, cap))
                .collect::<Result<_>>()?;
            let mut iter = parts.into_iter();
            let mut acc = iter.next().expect("sums are nonempty");
            for p in iter {
                acc.add_assign(&p);
            }
            Ok(acc)
        }
        other => {
            let dense = other.to_dense(cap).map_err(|e| match e {
                Error::CapExceeded { .. } => Error::Unsupported(format!(
                    "{} input with hashed Gaussian chains needs materialization: {e}",
                    other.kind()
                )),
                e => e,
            })?;
            dense::dense_modes(&dense, left, right, modes, cap)
        }
    }
}

/// All sketches of `t`, with the default materialization cap.
pub fn sketch(t: &StructuredTensor, left: &DrmChain, right: &DrmChain) -> Result<SketchPack> {
    sketch_with_cap(t, left, right, DEFAULT_MATERIALIZATION_CAP)
}

pub fn sketch_with_cap(
    t: &StructuredTensor,
    left: &DrmChain,
    right: &DrmChain,
    cap: usize,
) -> Result<SketchPack> {
    let d = t.shape().order();
    sketch_modes(t, left, right, &Modes::all(d), cap)?.into_pack(left, right)
}

fn full(
    shape: &crate::tensor::Shape,
    left: &DrmChain,
    right: &DrmChain,
    f: impl FnOnce(&Modes) -> Result<Partial>,
) -> Result<SketchPack> {
    let modes = Modes::all(shape.order());
    modes.check_chains(shape, left, right)?;
    f(&modes)?.into_pack(left, right)
}

pub fn sketch_dense(t: &DenseTensor, left: &DrmChain, right: &DrmChain) -> Result<SketchPack> {
    full(t.shape(), left, right, |m| {
        dense::dense_modes(t, left, right, m, DEFAULT_MATERIALIZATION_CAP)
    })
}

pub fn sketch_sparse(t: &SparseTensor, left: &DrmChain, right: &DrmChain) -> Result<SketchPack> {
    full(t.shape(), left, right, |m| sparse::sparse_modes(t, left, right, m))
}

/// TT input with TT chains.
pub fn sketch_tt(t: &TtTensor, left: &DrmChain, right: &DrmChain) -> Result<SketchPack> {
    full(t.shape(), left, right, |m| tt::tt_modes(t, left, right, m))
}

/// CP input with TT chains.
pub fn sketch_cp(t: &CpTensor, left: &DrmChain, right: &DrmChain) -> Result<SketchPack> {
    full(t.shape(), left, right, |m| cp::cp_modes(t, left, right, m))
}

/// Tucker input with TT chains.
pub fn sketch_tucker(t: &TuckerTensor, left: &DrmChain, right: &DrmChain) -> Result<SketchPack> {
    full(t.shape(), left, right, |m| {
        tucker::tucker_modes(t, left, right, m, DEFAULT_MATERIALIZATION_CAP)
    })
}

/// Sum of packs taken with the same chains, reduced in list order.
pub fn sketch_sum(parts: &[SketchPack]) -> Result<SketchPack> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| Error::Config("no sketches to add".into()))?;
    let mut acc = first.clone();
    for p in rest {
        acc.add_assign(p)?;
    }
    Ok(acc)
}

/// `Ψ_µ = (Y_{µ−1}ᵀ ⊗ I) T^{≤µ} X_µ` alone.
pub fn sketch_psi(t: &StructuredTensor, left: &DrmChain, right: &DrmChain, mu: usize) -> Result<Core3> {
    check_mode(mu, t.shape().order())?;
    let modes = Modes::none(t.shape().order()).with_psi(mu);
    Ok(sketch_modes(t, left, right, &modes, DEFAULT_MATERIALIZATION_CAP)?
        .take_psi(mu)
        .expect("requested"))
}

/// `Ω_µ = Y_µᵀ T^{≤µ} X_µ` alone.
pub fn sketch_omega(t: &StructuredTensor, left: &DrmChain, right: &DrmChain, mu: usize) -> Result<Matrix> {
    check_mode(mu, t.shape().order() - 1)?;
    let modes = Modes::none(t.shape().order()).with_omega(mu);
    Ok(sketch_modes(t, left, right, &modes, DEFAULT_MATERIALIZATION_CAP)?
        .take_omega(mu)
        .expect("requested"))
}

fn check_mode(mu: usize, hi: usize) -> Result<()> {
    if mu == 0 || mu > hi {
        return Err(Error::ModeOutOfRange { mu, max: hi });
    }
    Ok(())
}

/// Sketch with a fresh pair of chains built from `config`, then assemble.
pub fn stta_approximate(t: &StructuredTensor, config: &SttaConfig) -> Result<TtTensor> {
    let (left, right) = config.chains(t.shape())?;
    let pack = sketch(t, &left, &right)?;
    assemble(&pack, config)
}

#[cfg(test)]
mod tests;
