use super::{DenseTensor, Shape};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Core tensor `C` (s_1 × ⋯ × s_d) multiplied in mode µ by `U_µ` (n_µ × s_µ).
#[derive(Clone, Debug, PartialEq)]
pub struct TuckerTensor {
    shape: Shape,
    core: DenseTensor,
    factors: Vec<Matrix>,
}

impl TuckerTensor {
    pub fn new(core: DenseTensor, factors: Vec<Matrix>) -> Result<Self> {
        if factors.len() != core.shape().order() {
            return Err(Error::dims(
                "TuckerTensor::new",
                format!("{} factors for an order-{} core", factors.len(), core.shape().order()),
            ));
        }
        for (mu, (f, &s)) in factors.iter().zip(core.shape().dims()).enumerate() {
            if f.cols() != s {
                return Err(Error::dims(
                    "TuckerTensor::new",
                    format!("factor {} has {} columns, core mode has size {s}", mu + 1, f.cols()),
                ));
            }
        }
        let shape = Shape::new(factors.iter().map(Matrix::rows).collect())?;
        Ok(TuckerTensor {
            shape,
            core,
            factors,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn core(&self) -> &DenseTensor {
        &self.core
    }

    pub fn factors(&self) -> &[Matrix] {
        &self.factors
    }

    pub fn scale(&mut self, alpha: f64) {
        self.core.scale(alpha);
    }

    pub fn to_dense(&self, cap: usize) -> Result<DenseTensor> {
        let numel = self.shape.numel();
        if numel > cap {
            return Err(Error::CapExceeded { entries: numel, cap });
        }
        let mut t = self.core.clone();
        for (mode, f) in self.factors.iter().enumerate() {
            t = t.mode_product(mode, f)?;
        }
        Ok(t)
    }
}
