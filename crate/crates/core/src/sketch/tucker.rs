//! Sketches of a Tucker tensor with TT DRMs.
//!
//! The DRM cores are contracted with the factor matrices first, which turns
//! the problem into sketching the small core tensor; each `Ψ_µ` is then
//! mapped back to mode size `n_µ` by `U_µ`.

use super::dense::dense_modes;
use super::modes::{Modes, Partial};
use super::tt::require_tt_chains;
use crate::drm::DrmChain;
use crate::error::Result;
use crate::tensor::TuckerTensor;

pub(crate) fn tucker_modes(
    t: &TuckerTensor,
    left: &DrmChain,
    right: &DrmChain,
    modes: &Modes,
    cap: usize,
) -> Result<Partial> {
    require_tt_chains(left, right, "Tucker")?;
    let core = t.core();
    if core.shape().numel() > cap {
        return Err(crate::Error::CapExceeded {
            entries: core.shape().numel(),
            cap,
        });
    }
    let lp = left.project(t.factors())?;
    let rp = right.project(t.factors())?;
    let mut out = dense_modes(core, &lp, &rp, modes, cap)?;
    for (mu, slot) in out.psi.iter_mut().enumerate() {
        if let Some(p) = slot.take() {
            *slot = Some(p.mode2_product(&t.factors()[mu]));
        }
    }
    Ok(out)
}
