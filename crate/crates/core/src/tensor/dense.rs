use super::Shape;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Full tensor in row-major order (first index slowest).
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    shape: Shape,
    values: Vec<f64>,
}

impl DenseTensor {
    pub fn new(shape: Shape, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.numel() {
            return Err(Error::dims(
                "DenseTensor::new",
                format!("{} values for shape {shape}", values.len()),
            ));
        }
        Ok(DenseTensor { shape, values })
    }

    pub fn zeros(shape: Shape) -> Self {
        let n = shape.numel();
        DenseTensor {
            shape,
            values: vec![0.0; n],
        }
    }

    /// Build from a function of the 0-based multi-index.
    pub fn from_fn(shape: Shape, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let n = shape.numel();
        let d = shape.order();
        let dims = shape.dims().to_vec();
        let mut idx = vec![0usize; d];
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push(f(&idx));
            for k in (0..d).rev() {
                idx[k] += 1;
                if idx[k] < dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        DenseTensor { shape, values }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Entry at a 1-based multi-index.
    pub fn at(&self, index: &[usize]) -> Result<f64> {
        let idx = self.shape.to_zero_based(index)?;
        Ok(self.values[self.shape.linear_index(&idx)])
    }

    #[cfg(test)]
    pub(crate) fn get0(&self, index0: &[usize]) -> f64 {
        self.values[self.shape.linear_index(index0)]
    }

    /// Unfolding T^{≤µ}: first µ modes become rows.
    pub fn unfold(&self, mu: usize) -> Result<Matrix> {
        self.shape.check_unfolding_mode(mu)?;
        Ok(self.unfold_unchecked(mu))
    }

    /// Like [`DenseTensor::unfold`] but also accepts µ = 0 and µ = d.
    pub(crate) fn unfold_unchecked(&self, mu: usize) -> Matrix {
        Matrix::from_vec(
            self.shape.prefix_size(mu),
            self.shape.suffix_size(mu),
            self.values.clone(),
        )
        .expect("prefix·suffix equals numel")
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &DenseTensor) -> Result<f64> {
        self.shape.check_same(&other.shape)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum())
    }

    pub fn add_assign(&mut self, other: &DenseTensor) -> Result<()> {
        self.shape.check_same(&other.shape)?;
        self.values
            .iter_mut()
            .zip(&other.values)
            .for_each(|(a, b)| *a += b);
        Ok(())
    }

    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor> {
        self.shape.check_same(&other.shape)?;
        Ok(DenseTensor {
            shape: self.shape.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&mut self, alpha: f64) {
        self.values.iter_mut().for_each(|v| *v *= alpha);
    }

    /// Mode-µ product with `m` (new_n × n_µ); `mode` is 0-based.
    pub fn mode_product(&self, mode: usize, m: &Matrix) -> Result<DenseTensor> {
        let dims = self.shape.dims();
        if m.cols() != dims[mode] {
            return Err(Error::dims(
                "mode_product",
                format!("matrix has {} columns, mode has size {}", m.cols(), dims[mode]),
            ));
        }
        let outer: usize = dims[..mode].iter().product();
        let inner: usize = dims[mode + 1..].iter().product();
        let n_old = dims[mode];
        let n_new = m.rows();
        let mut new_dims = dims.to_vec();
        new_dims[mode] = n_new;
        let mut out = vec![0.0; outer * n_new * inner];
        for o in 0..outer {
            let src = Matrix::from_vec(
                n_old,
                inner,
                self.values[o * n_old * inner..(o + 1) * n_old * inner].to_vec(),
            )?;
            let prod = m.matmul(&src);
            out[o * n_new * inner..(o + 1) * n_new * inner].copy_from_slice(prod.as_slice());
        }
        DenseTensor::new(Shape::new(new_dims)?, out)
    }
}
