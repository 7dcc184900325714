use crate::drm::{DrmChain, Side};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::tensor::{Core3, Shape};

use super::SketchPack;

/// Which `Ψ_µ` (µ = 1..d) and `Ω_µ` (µ = 1..d−1) a kernel should compute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Modes {
    psi: Vec<bool>,
    omega: Vec<bool>,
}

impl Modes {
    pub fn all(d: usize) -> Self {
        Modes {
            psi: vec![true; d],
            omega: vec![true; d - 1],
        }
    }

    pub fn none(d: usize) -> Self {
        Modes {
            psi: vec![false; d],
            omega: vec![false; d - 1],
        }
    }

    pub fn with_psi(mut self, mu: usize) -> Self {
        self.psi[mu - 1] = true;
        self
    }

    pub fn with_omega(mut self, mu: usize) -> Self {
        self.omega[mu - 1] = true;
        self
    }

    pub fn order(&self) -> usize {
        self.psi.len()
    }

    #[inline]
    pub fn psi(&self, mu: usize) -> bool {
        self.psi[mu - 1]
    }

    #[inline]
    pub fn omega(&self, mu: usize) -> bool {
        mu < self.psi.len() && self.omega[mu - 1]
    }

    /// Left matrices `Y_µ` the request touches.
    pub fn left_needed(&self) -> Vec<usize> {
        let d = self.order();
        let mut v: Vec<usize> = (1..=d)
            .filter(|&mu| self.psi(mu))
            .map(|mu| mu - 1)
            .chain((1..d).filter(|&mu| self.omega(mu)))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Right matrices `X_µ` the request touches.
    pub fn right_needed(&self) -> Vec<usize> {
        let d = self.order();
        (1..=d).filter(|&mu| self.psi(mu) || self.omega(mu)).collect()
    }

    /// Largest left index needed, if any.
    pub fn max_left(&self) -> Option<usize> {
        self.left_needed().last().copied()
    }

    /// Smallest right index needed, if any.
    pub fn min_right(&self) -> Option<usize> {
        self.right_needed().first().copied()
    }

    pub fn check_chains(&self, shape: &Shape, left: &DrmChain, right: &DrmChain) -> Result<()> {
        if left.side() != Side::Left || right.side() != Side::Right {
            return Err(Error::Config("chains passed on the wrong side".into()));
        }
        shape.check_same(left.shape())?;
        shape.check_same(right.shape())?;
        for mu in self.left_needed() {
            if !left.has(mu) {
                return Err(Error::ModeOutOfRange {
                    mu,
                    max: left.mode_range().1,
                });
            }
        }
        for mu in self.right_needed() {
            if !right.has(mu) {
                return Err(Error::ModeOutOfRange {
                    mu,
                    max: right.mode_range().1,
                });
            }
        }
        Ok(())
    }
}

/// Sketches for a subset of modes.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Partial {
    pub psi: Vec<Option<Core3>>,
    pub omega: Vec<Option<Matrix>>,
}

impl Partial {
    pub fn empty(d: usize) -> Self {
        Partial {
            psi: vec![None; d],
            omega: vec![None; d - 1],
        }
    }

    pub fn set_psi(&mut self, mu: usize, c: Core3) {
        self.psi[mu - 1] = Some(c);
    }

    pub fn set_omega(&mut self, mu: usize, m: Matrix) {
        self.omega[mu - 1] = Some(m);
    }

    pub fn take_psi(&mut self, mu: usize) -> Option<Core3> {
        self.psi[mu - 1].take()
    }

    pub fn take_omega(&mut self, mu: usize) -> Option<Matrix> {
        self.omega[mu - 1].take()
    }

    /// Elementwise `self += other` over the entries both hold.
    pub fn add_assign(&mut self, other: &Partial) {
        for (a, b) in self.psi.iter_mut().zip(&other.psi) {
            if let (Some(a), Some(b)) = (a.as_mut(), b.as_ref()) {
                a.add_assign(b);
            }
        }
        for (a, b) in self.omega.iter_mut().zip(&other.omega) {
            if let (Some(a), Some(b)) = (a.as_mut(), b.as_ref()) {
                a.add_assign(b);
            }
        }
    }

    pub fn into_pack(self, left: &DrmChain, right: &DrmChain) -> Result<SketchPack> {
        let psi = self
            .psi
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Unsupported("incomplete sketch".into()))?;
        let omega = self
            .omega
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Unsupported("incomplete sketch".into()))?;
        SketchPack::new(
            left.shape().clone(),
            left.ranks()?,
            right.ranks()?,
            (left.fingerprint(), right.fingerprint()),
            psi,
            omega,
        )
    }
}
