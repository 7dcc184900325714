//! Reference methods sharing one `approximate` entry point with STTA.

mod matrix;
mod orth_sweep;
mod tt_svd;

pub use matrix::{gn_matrix, gn_sketch, hmt_matrix, hmt_with, left_drm, right_drm, GnSketch, LowRank};
pub use orth_sweep::{otts, otts_chains, tt_hmt};
pub use tt_svd::{tt_round, tt_round_tol, tt_svd, tt_svd_dense, tt_svd_tol};

use std::fmt;
use std::str::FromStr;

use crate::drm::DrmType;
use crate::error::{Error, Result};
use crate::sketch::{stta_approximate, Oversampling, SttaConfig};
use crate::tensor::{Core3, RankTuple, StructuredTensor, TtTensor, DEFAULT_MATERIALIZATION_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodKind {
    TtSvd,
    TtHmt,
    Stta,
    Otts,
    GnMatrix,
    HmtMatrix,
}

impl MethodKind {
    pub const ALL: [MethodKind; 6] = [
        MethodKind::TtSvd,
        MethodKind::TtHmt,
        MethodKind::Stta,
        MethodKind::Otts,
        MethodKind::GnMatrix,
        MethodKind::HmtMatrix,
    ];

    /// Whether results depend on the seed.
    pub fn is_randomized(self) -> bool {
        self != MethodKind::TtSvd
    }

    /// Whether the method uses a second, oversampled DRM.
    pub fn uses_oversampling(self) -> bool {
        matches!(self, MethodKind::Stta | MethodKind::Otts | MethodKind::GnMatrix)
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodKind::TtSvd => "TT_SVD",
            MethodKind::TtHmt => "TT_HMT",
            MethodKind::Stta => "STTA",
            MethodKind::Otts => "OTTS",
            MethodKind::GnMatrix => "GN_MATRIX",
            MethodKind::HmtMatrix => "HMT_MATRIX",
        })
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '_' | '-' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match key.as_str() {
            "ttsvd" => MethodKind::TtSvd,
            "tthmt" => MethodKind::TtHmt,
            "stta" => MethodKind::Stta,
            "otts" => MethodKind::Otts,
            "gn" | "gnmatrix" => MethodKind::GnMatrix,
            "hmt" | "hmtmatrix" => MethodKind::HmtMatrix,
            _ => return Err(Error::Config(format!("unknown method {s:?}"))),
        })
    }
}

/// Everything a method may need besides the tensor.
#[derive(Clone, Debug)]
pub struct MethodParams {
    /// Ranks of the output TT.
    pub ranks: RankTuple,
    /// Rule for the larger DRM rank of two-sided methods.
    pub oversampling: Oversampling,
    pub seed: u64,
    pub drm: DrmType,
}

/// Run `method` on `t`, returning a TT with ranks at most `params.ranks`.
///
/// The matrix methods accept order-2 inputs only.
pub fn approximate(method: MethodKind, t: &StructuredTensor, params: &MethodParams) -> Result<TtTensor> {
    let shape = t.shape();
    let target = params.ranks.clone().for_shape(shape)?;
    let larger = target.map(|r| params.oversampling.apply(r))?;
    match method {
        MethodKind::TtSvd => tt_svd(t, &target, DEFAULT_MATERIALIZATION_CAP),
        MethodKind::TtHmt => tt_hmt(t, &target, params.seed, params.drm),
        MethodKind::Stta => {
            let config = SttaConfig::new(larger, target, params.seed, params.drm)?;
            stta_approximate(t, &config)
        }
        MethodKind::Otts => otts(t, &target, &larger, params.seed, params.drm),
        MethodKind::GnMatrix | MethodKind::HmtMatrix => {
            if shape.order() != 2 {
                return Err(Error::Unsupported(format!(
                    "{method} needs an order-2 tensor, got order {}",
                    shape.order()
                )));
            }
            let dense = t.to_dense(DEFAULT_MATERIALIZATION_CAP)?;
            let a = dense.unfold(1)?;
            let r = target.get(1);
            let low = if method == MethodKind::GnMatrix {
                gn_matrix(&a, r, larger.get(1) - r, params.seed)?.1
            } else {
                hmt_matrix(&a, r, params.seed)?
            };
            low_rank_to_tt(&low)
        }
    }
}

fn low_rank_to_tt(low: &LowRank) -> Result<TtTensor> {
    let (m, k) = low.left.shape();
    let n = low.right.cols();
    TtTensor::new(vec![
        Core3::new(1, m, k, low.left.as_slice().to_vec())?,
        Core3::new(k, n, 1, low.right.as_slice().to_vec())?,
    ])
}
