//! Dimension-reduction matrices: hashed Gaussian rows and random TT chains.

mod chain;
mod hash;
mod normal;

pub use chain::{DrmChain, DrmKind, Fingerprint, HashBlock, Side};
pub use hash::{
    hash_linear_index, hash_to_normal, hashed_gaussian_row, hashed_gaussian_row_into,
    mantissa_uniform, mode_seed, splitmix64,
};
pub use normal::normal_inverse_cdf;

/// Which family of dimension-reduction matrices to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DrmType {
    Gaussian,
    Tt,
}

impl DrmType {
    pub fn chain(
        self,
        shape: &crate::tensor::Shape,
        ranks: &crate::tensor::RankTuple,
        side: Side,
        seed: u64,
    ) -> crate::Result<DrmChain> {
        match self {
            DrmType::Gaussian => DrmChain::gaussian(shape, ranks, side, seed),
            DrmType::Tt => DrmChain::tt(shape, ranks, side, seed),
        }
    }
}

impl std::str::FromStr for DrmType {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "gauss" | "hashed" => Ok(DrmType::Gaussian),
            "tt" => Ok(DrmType::Tt),
            other => Err(crate::Error::Config(format!("unknown DRM type {other:?}"))),
        }
    }
}

impl std::fmt::Display for DrmType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DrmType::Gaussian => "gaussian",
            DrmType::Tt => "tt",
        })
    }
}
