use super::{Core3, DenseTensor, Shape, TtTensor};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// `T = Σ_k V_1[k,:] ⊗ ⋯ ⊗ V_d[k,:]` with factors `V_µ` of size `N × n_µ`.
#[derive(Clone, Debug, PartialEq)]
pub struct CpTensor {
    shape: Shape,
    factors: Vec<Matrix>,
}

impl CpTensor {
    pub fn new(factors: Vec<Matrix>) -> Result<Self> {
        let shape = Shape::new(factors.iter().map(Matrix::cols).collect())?;
        let n_terms = factors[0].rows();
        if n_terms == 0 {
            return Err(Error::InvalidRanks("CP tensor needs at least one term".into()));
        }
        if let Some(f) = factors.iter().find(|f| f.rows() != n_terms) {
            return Err(Error::dims(
                "CpTensor::new",
                format!("factor has {} rows, expected {n_terms}", f.rows()),
            ));
        }
        Ok(CpTensor { shape, factors })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn n_terms(&self) -> usize {
        self.factors[0].rows()
    }

    pub fn factors(&self) -> &[Matrix] {
        &self.factors
    }

    pub fn scale(&mut self, alpha: f64) {
        self.factors[0].scale(alpha);
    }

    pub fn entry0(&self, index0: &[usize]) -> f64 {
        (0..self.n_terms())
            .map(|k| {
                self.factors
                    .iter()
                    .zip(index0)
                    .map(|(f, &i)| f[(k, i)])
                    .product::<f64>()
            })
            .sum()
    }

    pub fn to_dense(&self, cap: usize) -> Result<DenseTensor> {
        let numel = self.shape.numel();
        if numel > cap {
            return Err(Error::CapExceeded { entries: numel, cap });
        }
        Ok(DenseTensor::from_fn(self.shape.clone(), |idx| self.entry0(idx)))
    }

    /// Exact TT representation with diagonal cores of rank N.
    pub fn to_tt(&self) -> TtTensor {
        let d = self.shape.order();
        let r = self.n_terms();
        let cores = self
            .factors
            .iter()
            .enumerate()
            .map(|(mu, f)| {
                let n = f.cols();
                let left = if mu == 0 { 1 } else { r };
                let right = if mu == d - 1 { 1 } else { r };
                let mut c = Core3::zeros(left, n, right);
                for k in 0..r {
                    let (a, b) = (if mu == 0 { 0 } else { k }, if mu == d - 1 { 0 } else { k });
                    for i in 0..n {
                        *c.get_mut(a, i, b) = f[(k, i)];
                    }
                }
                c
            })
            .collect();
        TtTensor::new(cores).expect("diagonal cores have consistent ranks")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::test_util::gaussian_matrix;

    #[test]
    fn rank_one_unit_vectors() {
        let factors = vec![
            Matrix::from_rows(&[&[1.0, 0.0]]),
            Matrix::from_rows(&[&[1.0, 0.0, 0.0]]),
            Matrix::from_rows(&[&[1.0, 0.0]]),
        ];
        let t = CpTensor::new(factors).unwrap().to_dense(100).unwrap();
        assert_eq!(t.values()[0], 1.0);
        assert_eq!(t.values().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn tt_conversion_matches_dense() {
        let factors = vec![
            gaussian_matrix(4, 3, 1),
            gaussian_matrix(4, 5, 2),
            gaussian_matrix(4, 2, 3),
            gaussian_matrix(4, 3, 4),
        ];
        let cp = CpTensor::new(factors).unwrap();
        let a = cp.to_dense(1000).unwrap();
        let b = cp.to_tt().to_dense(1000).unwrap();
        assert!(a.sub(&b).unwrap().norm() <= 1e-14 * a.norm());
    }

    #[test]
    fn mismatched_term_counts_rejected() {
        let factors = vec![gaussian_matrix(3, 2, 1), gaussian_matrix(4, 2, 2)];
        assert!(CpTensor::new(factors).is_err());
    }
}
