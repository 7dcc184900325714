//! TT cores from a sketch pack by pseudoinverse least-squares solves.

use super::config::{Orientation, SttaConfig};
use super::pack::SketchPack;
use crate::error::{Error, Result};
use crate::linalg::{lstsq_pinv, right_lstsq_pinv};
use crate::tensor::{Core3, TtTensor};

/// Assemble the TT approximation from `pack`.
///
/// With right ranks smaller, `C_1 = Ψ_1` and `C_µ^R = Ω_{µ−1}⁺ Ψ_µ^R`.
/// With left ranks smaller, `C_µ^L = Ψ_µ^L Ω_µ⁺` and `C_d = Ψ_d`.
/// Rank-deficient `Ω_µ` are truncated at `config.rtol`.
pub fn assemble(pack: &SketchPack, config: &SttaConfig) -> Result<TtTensor> {
    if pack.left_ranks() != &config.left_ranks || pack.right_ranks() != &config.right_ranks {
        return Err(Error::InvalidRanks(format!(
            "pack ranks {:?}/{:?} differ from config ranks {:?}/{:?}",
            pack.left_ranks().as_slice(),
            pack.right_ranks().as_slice(),
            config.left_ranks.as_slice(),
            config.right_ranks.as_slice()
        )));
    }
    assemble_oriented(pack, config.orientation()?, config.rtol)
}

/// Assemble using the orientation implied by the pack's own ranks.
pub fn assemble_pack(pack: &SketchPack, rtol: f64) -> Result<TtTensor> {
    let orientation = Orientation::detect(pack.left_ranks(), pack.right_ranks())?;
    assemble_oriented(pack, orientation, rtol)
}

fn assemble_oriented(pack: &SketchPack, orientation: Orientation, rtol: f64) -> Result<TtTensor> {
    let d = pack.order();
    let mut cores = Vec::with_capacity(d);
    match orientation {
        Orientation::RightSmaller => {
            cores.push(pack.psi(1).clone());
            for mu in 2..=d {
                let psi = pack.psi(mu);
                let c = lstsq_pinv(pack.omega(mu - 1), &psi.right_unfolding(), rtol)?;
                cores.push(Core3::from_right_unfolding(c, psi.n())?);
            }
        }
        Orientation::LeftSmaller => {
            for mu in 1..d {
                let psi = pack.psi(mu);
                let c = right_lstsq_pinv(pack.omega(mu), &psi.left_unfolding(), rtol)?;
                cores.push(Core3::from_left_unfolding(c, psi.n())?);
            }
            cores.push(pack.psi(d).clone());
        }
    }
    TtTensor::new(cores)
}
