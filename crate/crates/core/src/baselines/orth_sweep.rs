//! Left-to-right sketching sweeps that orthogonalize each new core: TT-HMT
//! and the orthogonalized two-sided variant OTTS.
//!
//! Both sketch with the interface `C_{≤µ−1}` of the cores built so far in
//! place of a random left DRM. That interface is a left TT chain, so every
//! sketch kernel applies unchanged.

use crate::drm::{splitmix64, DrmChain, DrmType, Side};
use crate::error::{Error, Result};
use crate::linalg::{orth, right_lstsq_pinv, Matrix, DEFAULT_RTOL};
use crate::sketch::{sketch_omega, sketch_psi};
use crate::tensor::{Core3, RankTuple, StructuredTensor, TtTensor};

const LEFT_STREAM: u64 = 0x4F54_5453_4C45_4654;

fn sweep(
    t: &StructuredTensor,
    right: &DrmChain,
    mut left_factor: impl FnMut(usize, &Core3) -> Result<Matrix>,
) -> Result<TtTensor> {
    let shape = t.shape();
    let d = shape.order();
    let mut cores: Vec<Core3> = Vec::with_capacity(d);
    for mu in 1..=d {
        let interface = DrmChain::from_tt_cores(shape, Side::Left, cores.clone(), 0)?;
        let psi = sketch_psi(t, &interface, right, mu)?;
        if mu == d {
            cores.push(psi);
        } else {
            let q = orth(&left_factor(mu, &psi)?);
            cores.push(Core3::from_left_unfolding(q, psi.n())?);
        }
    }
    TtTensor::new(cores)
}

/// TT-HMT: `C_µ^L = orth(Ψ_µ^L)` with `Ψ_µ = (C_{≤µ−1}ᵀ ⊗ I) T^{≤µ} X_µ`.
/// Cores 1..d−1 of the result are left-orthogonal.
pub fn tt_hmt(t: &StructuredTensor, ranks: &RankTuple, seed: u64, drm: DrmType) -> Result<TtTensor> {
    let ranks = ranks.clone().for_shape(t.shape())?;
    let right = drm.chain(t.shape(), &ranks, Side::Right, seed)?;
    sweep(t, &right, |_, psi| Ok(psi.left_unfolding()))
}

/// OTTS: as TT-HMT, but `C_µ^L = orth(Ψ_µ^L Ω_µ⁺)` with `Ω_µ = Y_µᵀ T^{≤µ} X_µ`.
/// The output has ranks `left_ranks`, which must be below `right_ranks`.
pub fn otts(
    t: &StructuredTensor,
    left_ranks: &RankTuple,
    right_ranks: &RankTuple,
    seed: u64,
    drm: DrmType,
) -> Result<TtTensor> {
    let left_ranks = left_ranks.clone().for_shape(t.shape())?;
    let right_ranks = right_ranks.clone().for_shape(t.shape())?;
    if left_ranks.as_slice().iter().zip(right_ranks.as_slice()).any(|(l, r)| l >= r) {
        return Err(Error::InvalidRanks(format!(
            "OTTS needs left ranks {:?} below right ranks {:?}",
            left_ranks.as_slice(),
            right_ranks.as_slice()
        )));
    }
    let (left, right) = otts_chains(t, &left_ranks, &right_ranks, seed, drm)?;
    sweep(t, &right, |mu, psi| {
        let omega = sketch_omega(t, &left, &right, mu)?;
        right_lstsq_pinv(&omega, &psi.left_unfolding(), DEFAULT_RTOL)
    })
}

/// The DRM pair OTTS draws for these arguments.
pub fn otts_chains(
    t: &StructuredTensor,
    left_ranks: &RankTuple,
    right_ranks: &RankTuple,
    seed: u64,
    drm: DrmType,
) -> Result<(DrmChain, DrmChain)> {
    Ok((
        drm.chain(t.shape(), left_ranks, Side::Left, splitmix64(seed ^ LEFT_STREAM))?,
        drm.chain(t.shape(), right_ranks, Side::Right, seed)?,
    ))
}
