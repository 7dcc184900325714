use std::collections::HashSet;

use super::{DenseTensor, Shape};
use crate::error::{Error, Result};

/// Coordinate-format tensor. Indices are stored 0-based; the constructor
/// takes 1-based indices and rejects duplicates.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseTensor {
    shape: Shape,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseTensor {
    /// Build from `(1-based multi-index, value)` pairs.
    pub fn new(shape: Shape, entries: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        let d = shape.order();
        let mut indices = Vec::with_capacity(entries.len() * d);
        let mut values = Vec::with_capacity(entries.len());
        let mut seen = HashSet::with_capacity(entries.len());
        for (idx, v) in entries {
            let idx0 = shape.to_zero_based(&idx)?;
            if !seen.insert(shape.linear_index(&idx0)) {
                return Err(Error::DuplicateIndex(idx));
            }
            indices.extend_from_slice(&idx0);
            values.push(v);
        }
        Ok(SparseTensor {
            shape,
            indices,
            values,
        })
    }

    /// Build from 0-based index rows (`nnz × d`, flattened) without the duplicate
    /// check; callers guarantee distinct in-range indices.
    pub(crate) fn from_raw(shape: Shape, indices: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert_eq!(indices.len(), values.len() * shape.order());
        SparseTensor {
            shape,
            indices,
            values,
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// 0-based multi-index of entry `k`.
    #[inline]
    pub fn index0(&self, k: usize) -> &[usize] {
        let d = self.shape.order();
        &self.indices[k * d..(k + 1) * d]
    }

    /// `(1-based multi-index, value)` pairs in stored order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        (0..self.nnz()).map(|k| (self.index0(k).iter().map(|i| i + 1).collect(), self.values[k]))
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, alpha: f64) {
        self.values.iter_mut().for_each(|v| *v *= alpha);
    }

    pub fn to_dense(&self, cap: usize) -> Result<DenseTensor> {
        let numel = self.shape.numel();
        if numel > cap {
            return Err(Error::CapExceeded { entries: numel, cap });
        }
        let mut t = DenseTensor::zeros(self.shape.clone());
        for k in 0..self.nnz() {
            let off = self.shape.linear_index(self.index0(k));
            t.values_mut()[off] += self.values[k];
        }
        Ok(t)
    }
}
