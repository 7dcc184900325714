use std::fmt;

use crate::error::{Error, Result};

/// Mode sizes `n_1 × ⋯ × n_d` of an order-d tensor, d ≥ 2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidShape(format!(
                "order must be at least 2, got {}",
                dims.len()
            )));
        }
        if dims.iter().any(|&n| n == 0) {
            return Err(Error::InvalidShape(format!("zero-sized mode in {dims:?}")));
        }
        dims.iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::InvalidShape(format!("entry count of {dims:?} overflows")))?;
        Ok(Shape { dims })
    }

    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Shape::new(vec![n; d])
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Size of mode `mu` (1-based).
    #[inline]
    pub fn mode(&self, mu: usize) -> usize {
        self.dims[mu - 1]
    }

    pub fn numel(&self) -> usize {
        self.dims.iter().product()
    }

    /// `n_1 ⋯ n_µ` (1 for µ = 0).
    pub fn prefix_size(&self, mu: usize) -> usize {
        self.dims[..mu].iter().product()
    }

    /// `n_{µ+1} ⋯ n_d` (1 for µ = d).
    pub fn suffix_size(&self, mu: usize) -> usize {
        self.dims[mu..].iter().product()
    }

    pub(crate) fn check_unfolding_mode(&self, mu: usize) -> Result<()> {
        if mu == 0 || mu >= self.order() {
            return Err(Error::ModeOutOfRange {
                mu,
                max: self.order() - 1,
            });
        }
        Ok(())
    }

    pub(crate) fn check_same(&self, other: &Shape) -> Result<()> {
        if self != other {
            return Err(Error::ShapeMismatch {
                expected: self.dims.clone(),
                got: other.dims.clone(),
            });
        }
        Ok(())
    }

    /// Validate a 1-based multi-index and convert it to 0-based.
    pub fn to_zero_based(&self, index: &[usize]) -> Result<Vec<usize>> {
        if index.len() != self.order()
            || index.iter().zip(&self.dims).any(|(&i, &n)| i == 0 || i > n)
        {
            return Err(Error::IndexOutOfBounds {
                index: index.to_vec(),
                dims: self.dims.clone(),
            });
        }
        Ok(index.iter().map(|i| i - 1).collect())
    }

    /// Row-major linear offset of a 0-based multi-index (first index slowest).
    #[inline]
    pub fn linear_index(&self, index0: &[usize]) -> usize {
        linearize(index0, &self.dims)
    }

    /// Inverse of [`Shape::linear_index`].
    pub fn multi_index(&self, mut offset: usize) -> Vec<usize> {
        let mut idx = vec![0; self.order()];
        for (slot, &n) in idx.iter_mut().zip(&self.dims).rev() {
            *slot = offset % n;
            offset /= n;
        }
        idx
    }

    /// Largest rank an unfolding µ can have: min(n_1⋯n_µ, n_{µ+1}⋯n_d).
    pub fn max_rank(&self, mu: usize) -> usize {
        self.prefix_size(mu).min(self.suffix_size(mu))
    }
}

/// Row-major linearization of a 0-based multi-index over `dims`.
#[inline]
pub fn linearize(index0: &[usize], dims: &[usize]) -> usize {
    index0
        .iter()
        .zip(dims)
        .fold(0usize, |acc, (&i, &n)| acc * n + i)
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Shape{:?}", self.dims)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|n| n.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// TT ranks `r_1 … r_{d−1}`; the boundary ranks r_0 = r_d = 1 are implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankTuple(Vec<usize>);

impl RankTuple {
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        if ranks.iter().any(|&r| r == 0) {
            return Err(Error::InvalidRanks(format!("zero rank in {ranks:?}")));
        }
        Ok(RankTuple(ranks))
    }

    pub fn uniform(d: usize, r: usize) -> Result<Self> {
        RankTuple::new(vec![r; d.saturating_sub(1)])
    }

    /// Uniform rank `r` clipped so no unfolding asks for more than it has:
    /// `r_µ = min(r, n_1⋯n_µ, n_{µ+1}⋯n_d)`.
    pub fn clipped(shape: &Shape, r: usize) -> Result<Self> {
        let d = shape.order();
        RankTuple::new((1..d).map(|mu| r.min(shape.max_rank(mu))).collect())
    }

    pub fn for_shape(self, shape: &Shape) -> Result<Self> {
        if self.0.len() + 1 != shape.order() {
            return Err(Error::InvalidRanks(format!(
                "{} ranks for an order-{} tensor",
                self.0.len(),
                shape.order()
            )));
        }
        Ok(self)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// r_µ with boundary convention r_0 = r_d = 1.
    pub fn get(&self, mu: usize) -> usize {
        if mu == 0 || mu > self.0.len() {
            1
        } else {
            self.0[mu - 1]
        }
    }

    pub fn max(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(1)
    }

    pub fn map(&self, f: impl Fn(usize) -> usize) -> Result<Self> {
        RankTuple::new(self.0.iter().map(|&r| f(r)).collect())
    }
}
