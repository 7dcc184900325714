//! Rank pairs, DRM choice and solver tolerance for one STTA run.

use std::fmt;
use std::str::FromStr;

use crate::drm::{splitmix64, DrmChain, DrmType, Side};
use crate::error::{Error, Result};
use crate::linalg::DEFAULT_RTOL;
use crate::tensor::{RankTuple, Shape};

/// Which side carries the smaller (target) ranks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// `r^R_µ < r^L_µ` for every µ; the output has ranks `r^R`.
    RightSmaller,
    /// `r^L_µ < r^R_µ` for every µ; the output has ranks `r^L`.
    LeftSmaller,
}

impl Orientation {
    /// Orientation of a rank pair, requiring the same strict inequality at every mode.
    pub fn detect(left: &RankTuple, right: &RankTuple) -> Result<Orientation> {
        if left.len() != right.len() {
            return Err(Error::InvalidRanks(format!(
                "left ranks {:?} and right ranks {:?} differ in length",
                left.as_slice(),
                right.as_slice()
            )));
        }
        let pairs = || left.as_slice().iter().zip(right.as_slice());
        if pairs().all(|(l, r)| r < l) {
            Ok(Orientation::RightSmaller)
        } else if pairs().all(|(l, r)| l < r) {
            Ok(Orientation::LeftSmaller)
        } else {
            let bad: Vec<usize> = pairs()
                .enumerate()
                .filter(|(_, (l, r))| l == r)
                .map(|(i, _)| i + 1)
                .collect();
            Err(Error::InvalidRanks(format!(
                "left ranks {:?} and right ranks {:?} must differ strictly in the same direction at every mode{}",
                left.as_slice(),
                right.as_slice(),
                if bad.is_empty() {
                    String::new()
                } else {
                    format!(" (equal at modes {bad:?})")
                }
            )))
        }
    }
}

/// Rule deriving the larger rank from the target rank `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Oversampling {
    /// `ceil(f·r)`.
    Factor(f64),
    /// `r + ℓ`.
    Add(usize),
}

impl Default for Oversampling {
    fn default() -> Self {
        Oversampling::Factor(2.0)
    }
}

impl Oversampling {
    pub fn apply(self, r: usize) -> usize {
        match self {
            Oversampling::Factor(f) => (f * r as f64).ceil() as usize,
            Oversampling::Add(l) => r + l,
        }
    }
}

impl FromStr for Oversampling {
    type Err = Error;

    /// Accepts `2r`, `1.5r`, `2*r`, `r+3` and `r`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Config(format!("cannot parse oversampling rule {s:?}"));
        if t == "r" {
            return Ok(Oversampling::Add(0));
        }
        if let Some(rest) = t.strip_prefix("r+") {
            return rest.parse().map(Oversampling::Add).map_err(|_| bad());
        }
        if let Some(f) = t.strip_suffix('r') {
            let f = f.strip_suffix('*').unwrap_or(f);
            let f: f64 = f.parse().map_err(|_| bad())?;
            if !(f.is_finite() && f > 0.0) {
                return Err(bad());
            }
            return Ok(Oversampling::Factor(f));
        }
        Err(bad())
    }
}

impl fmt::Display for Oversampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Oversampling::Factor(x) => write!(f, "{x}r"),
            Oversampling::Add(l) => write!(f, "r+{l}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SttaConfig {
    pub left_ranks: RankTuple,
    pub right_ranks: RankTuple,
    pub seed: u64,
    pub drm: DrmType,
    pub rtol: f64,
}

impl SttaConfig {
    /// Validated config; the rank pair must have a strict orientation.
    pub fn new(left_ranks: RankTuple, right_ranks: RankTuple, seed: u64, drm: DrmType) -> Result<Self> {
        Orientation::detect(&left_ranks, &right_ranks)?;
        Ok(SttaConfig {
            left_ranks,
            right_ranks,
            seed,
            drm,
            rtol: DEFAULT_RTOL,
        })
    }

    /// Target rank `r` (clipped to the shape) on the right, oversampled ranks on the left.
    pub fn right_target(shape: &Shape, r: usize, rule: Oversampling, seed: u64, drm: DrmType) -> Result<Self> {
        let right = RankTuple::clipped(shape, r)?;
        let left = right.map(|x| rule.apply(x))?;
        SttaConfig::new(left, right, seed, drm)
    }

    /// Mirror of [`SttaConfig::right_target`]: output ranks on the left.
    pub fn left_target(shape: &Shape, r: usize, rule: Oversampling, seed: u64, drm: DrmType) -> Result<Self> {
        let left = RankTuple::clipped(shape, r)?;
        let right = left.map(|x| rule.apply(x))?;
        SttaConfig::new(left, right, seed, drm)
    }

    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.rtol = rtol;
        self
    }

    pub fn orientation(&self) -> Result<Orientation> {
        Orientation::detect(&self.left_ranks, &self.right_ranks)
    }

    /// Ranks of the assembled TT.
    pub fn target_ranks(&self) -> Result<&RankTuple> {
        Ok(match self.orientation()? {
            Orientation::RightSmaller => &self.right_ranks,
            Orientation::LeftSmaller => &self.left_ranks,
        })
    }

    /// Modes where the larger rank exceeds the smaller by less than 2.
    pub fn warnings(&self) -> Vec<String> {
        self.left_ranks
            .as_slice()
            .iter()
            .zip(self.right_ranks.as_slice())
            .enumerate()
            .filter(|(_, (l, r))| l.abs_diff(**r) < 2)
            .map(|(i, (l, r))| {
                format!(
                    "mode {}: left rank {l} and right rank {r} differ by less than 2; the error bound does not apply",
                    i + 1
                )
            })
            .collect()
    }

    /// Fresh left and right chains for `shape`, drawn from independent seed streams.
    pub fn chains(&self, shape: &Shape) -> Result<(DrmChain, DrmChain)> {
        self.orientation()?;
        let left_ranks = self.left_ranks.clone().for_shape(shape)?;
        let right_ranks = self.right_ranks.clone().for_shape(shape)?;
        let left = self.drm.chain(shape, &left_ranks, Side::Left, self.seed)?;
        let right = self.drm.chain(shape, &right_ranks, Side::Right, splitmix64(self.seed ^ RIGHT_STREAM))?;
        Ok((left, right))
    }
}

const RIGHT_STREAM: u64 = 0x5249_4748_5453_4944;
