//! Tensor-train format: cores, entry evaluation, interface matrices,
//! orthogonalization and inner products.

use super::{DenseTensor, RankTuple, Shape};
use crate::error::{Error, Result};
use crate::linalg::{qr_economy, Matrix};

/// Order-3 array of size `left × n × right`, row-major `[a][i][b]`.
///
/// Its left unfolding `(left·n) × right` and right unfolding `left × (n·right)`
/// share the same buffer.
#[derive(Clone, Debug, PartialEq)]
pub struct Core3 {
    left: usize,
    n: usize,
    right: usize,
    data: Vec<f64>,
}

impl Core3 {
    pub fn new(left: usize, n: usize, right: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != left * n * right {
            return Err(Error::dims(
                "Core3::new",
                format!("{} values for a {left}x{n}x{right} core", data.len()),
            ));
        }
        Ok(Core3 {
            left,
            n,
            right,
            data,
        })
    }

    pub fn zeros(left: usize, n: usize, right: usize) -> Self {
        Core3 {
            left,
            n,
            right,
            data: vec![0.0; left * n * right],
        }
    }

    pub fn from_left_unfolding(m: Matrix, n: usize) -> Result<Self> {
        let (rows, right) = m.shape();
        if n == 0 || rows % n != 0 {
            return Err(Error::dims("Core3::from_left_unfolding", "rows not divisible by n"));
        }
        Core3::new(rows / n, n, right, m.into_vec())
    }

    pub fn from_right_unfolding(m: Matrix, n: usize) -> Result<Self> {
        let (left, cols) = m.shape();
        if n == 0 || cols % n != 0 {
            return Err(Error::dims("Core3::from_right_unfolding", "cols not divisible by n"));
        }
        Core3::new(left, n, cols / n, m.into_vec())
    }

    #[inline]
    pub fn left(&self) -> usize {
        self.left
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn right(&self) -> usize {
        self.right
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.left, self.n, self.right)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, a: usize, i: usize, b: usize) -> f64 {
        self.data[(a * self.n + i) * self.right + b]
    }

    #[inline]
    pub fn get_mut(&mut self, a: usize, i: usize, b: usize) -> &mut f64 {
        &mut self.data[(a * self.n + i) * self.right + b]
    }

    /// `(left·n) × right`.
    pub fn left_unfolding(&self) -> Matrix {
        Matrix::from_vec(self.left * self.n, self.right, self.data.clone()).unwrap()
    }

    /// `left × (n·right)`.
    pub fn right_unfolding(&self) -> Matrix {
        Matrix::from_vec(self.left, self.n * self.right, self.data.clone()).unwrap()
    }

    /// The `left × right` slice at middle index `i`.
    pub fn slice(&self, i: usize) -> Matrix {
        Matrix::from_fn(self.left, self.right, |a, b| self.get(a, i, b))
    }

    pub fn scale(&mut self, alpha: f64) {
        self.data.iter_mut().for_each(|v| *v *= alpha);
    }

    pub fn add_assign(&mut self, other: &Core3) {
        assert_eq!(self.dims(), other.dims());
        self.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a += b);
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Multiply the middle mode: `out[a, j, b] = Σ_i m[j, i] · self[a, i, b]`.
    pub fn mode2_product(&self, m: &Matrix) -> Core3 {
        assert_eq!(m.cols(), self.n);
        let nn = m.rows();
        let mut out = Core3::zeros(self.left, nn, self.right);
        for a in 0..self.left {
            let block = Matrix::from_vec(
                self.n,
                self.right,
                self.data[a * self.n * self.right..(a + 1) * self.n * self.right].to_vec(),
            )
            .unwrap();
            let prod = m.matmul(&block);
            out.data[a * nn * self.right..(a + 1) * nn * self.right]
                .copy_from_slice(prod.as_slice());
        }
        out
    }

    /// Copy `src` into the block starting at (`a0`, 0, `b0`).
    pub(crate) fn write_block(&mut self, a0: usize, b0: usize, src: &Core3) {
        assert_eq!(src.n, self.n);
        for a in 0..src.left {
            for i in 0..src.n {
                for b in 0..src.right {
                    *self.get_mut(a0 + a, i, b0 + b) = src.get(a, i, b);
                }
            }
        }
    }

    /// Sub-block with left range `a0..a1` and right range `b0..b1`.
    #[cfg(test)]
    pub(crate) fn block(&self, a0: usize, a1: usize, b0: usize, b1: usize) -> Core3 {
        let mut out = Core3::zeros(a1 - a0, self.n, b1 - b0);
        for a in a0..a1 {
            for i in 0..self.n {
                for b in b0..b1 {
                    *out.get_mut(a - a0, i, b - b0) = self.get(a, i, b);
                }
            }
        }
        out
    }
}

/// A tensor in TT format with cores `C_µ` of size `r_{µ−1} × n_µ × r_µ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TtTensor {
    shape: Shape,
    cores: Vec<Core3>,
}

impl TtTensor {
    pub fn new(cores: Vec<Core3>) -> Result<Self> {
        let shape = Shape::new(cores.iter().map(Core3::n).collect())?;
        if cores[0].left != 1 || cores[cores.len() - 1].right != 1 {
            return Err(Error::InvalidRanks("boundary ranks must be 1".into()));
        }
        for (mu, w) in cores.windows(2).enumerate() {
            if w[0].right != w[1].left {
                return Err(Error::InvalidRanks(format!(
                    "core {} has right rank {} but core {} has left rank {}",
                    mu + 1,
                    w[0].right,
                    mu + 2,
                    w[1].left
                )));
            }
        }
        Ok(TtTensor { shape, cores })
    }

    /// The zero tensor with all ranks 1.
    pub fn zeros(shape: &Shape) -> Self {
        let cores = shape.dims().iter().map(|&n| Core3::zeros(1, n, 1)).collect();
        TtTensor {
            shape: shape.clone(),
            cores,
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    pub fn cores(&self) -> &[Core3] {
        &self.cores
    }

    pub fn cores_mut(&mut self) -> &mut [Core3] {
        &mut self.cores
    }

    pub fn into_cores(self) -> Vec<Core3> {
        self.cores
    }

    /// Core µ (1-based).
    pub fn core(&self, mu: usize) -> &Core3 {
        &self.cores[mu - 1]
    }

    pub fn ranks(&self) -> RankTuple {
        RankTuple::new(self.cores[..self.cores.len() - 1].iter().map(Core3::right).collect())
            .expect("core ranks are positive")
    }

    pub fn num_params(&self) -> usize {
        self.cores.iter().map(|c| c.data.len()).sum()
    }

    /// Entry at a 1-based multi-index via the matrix-product chain.
    pub fn entry(&self, index: &[usize]) -> Result<f64> {
        let idx = self.shape.to_zero_based(index)?;
        Ok(self.entry0(&idx))
    }

    pub(crate) fn entry0(&self, index0: &[usize]) -> f64 {
        let mut v = vec![1.0];
        for (core, &i) in self.cores.iter().zip(index0) {
            let mut next = vec![0.0; core.right];
            for (a, va) in v.iter().enumerate() {
                if *va == 0.0 {
                    continue;
                }
                for (b, nb) in next.iter_mut().enumerate() {
                    *nb += va * core.get(a, i, b);
                }
            }
            v = next;
        }
        v[0]
    }

    /// Left interface matrix `C_{≤µ}` of size `(n_1⋯n_µ) × r_µ`, for 0 ≤ µ ≤ d.
    pub fn left_interface(&self, mu: usize) -> Matrix {
        left_interface_of(&self.cores[..mu])
    }

    /// Right interface matrix `C_{>µ}` of size `(n_{µ+1}⋯n_d) × r_µ`, for 0 ≤ µ ≤ d.
    pub fn right_interface(&self, mu: usize) -> Matrix {
        right_interface_of(&self.cores[mu..])
    }

    /// `(C_{≤µ}, C_{>µ})` with `T^{≤µ} = C_{≤µ} C_{>µ}ᵀ`.
    pub fn interface_matrices(&self, mu: usize, cap: usize) -> Result<(Matrix, Matrix)> {
        self.shape.check_unfolding_mode(mu)?;
        let need = self.shape.prefix_size(mu) * self.cores[mu - 1].right
            + self.shape.suffix_size(mu) * self.cores[mu - 1].right;
        if need > cap {
            return Err(Error::CapExceeded { entries: need, cap });
        }
        Ok((self.left_interface(mu), self.right_interface(mu)))
    }

    pub fn to_dense(&self, cap: usize) -> Result<DenseTensor> {
        let numel = self.shape.numel();
        if numel > cap {
            return Err(Error::CapExceeded { entries: numel, cap });
        }
        let full = self.left_interface(self.order());
        DenseTensor::new(self.shape.clone(), full.into_vec())
    }

    /// Multiply the tensor by `alpha` (applied to the first core).
    pub fn scale(&mut self, alpha: f64) {
        self.cores[0].scale(alpha);
    }

    pub fn scaled(&self, alpha: f64) -> TtTensor {
        let mut t = self.clone();
        t.scale(alpha);
        t
    }

    /// Exact sum in TT format; ranks add.
    pub fn add(&self, other: &TtTensor) -> Result<TtTensor> {
        self.shape.check_same(&other.shape)?;
        let d = self.order();
        let mut cores = Vec::with_capacity(d);
        for mu in 0..d {
            let a = &self.cores[mu];
            let b = &other.cores[mu];
            let left = if mu == 0 { 1 } else { a.left + b.left };
            let right = if mu == d - 1 { 1 } else { a.right + b.right };
            let mut c = Core3::zeros(left, a.n, right);
            let (a_off, b_off_left) = (0, if mu == 0 { 0 } else { a.left });
            let b_off_right = if mu == d - 1 { 0 } else { a.right };
            for i in 0..a.n {
                for x in 0..a.left {
                    for y in 0..a.right {
                        *c.get_mut(a_off + x, i, y) += a.get(x, i, y);
                    }
                }
                for x in 0..b.left {
                    for y in 0..b.right {
                        *c.get_mut(b_off_left + x, i, b_off_right + y) += b.get(x, i, y);
                    }
                }
            }
            cores.push(c);
        }
        TtTensor::new(cores)
    }

    pub fn sub(&self, other: &TtTensor) -> Result<TtTensor> {
        self.add(&other.scaled(-1.0))
    }

    /// Left-orthogonalize cores 1..d−1 by a QR sweep; ranks may shrink.
    pub fn left_orthogonalize(&mut self) {
        let d = self.order();
        for mu in 0..d - 1 {
            let n = self.cores[mu].n;
            let (q, r) = qr_economy(&self.cores[mu].left_unfolding());
            self.cores[mu] = Core3::from_left_unfolding(q, n).unwrap();
            let next = &self.cores[mu + 1];
            let nn = next.n;
            let merged = r.matmul(&next.right_unfolding());
            self.cores[mu + 1] = Core3::from_right_unfolding(merged, nn).unwrap();
        }
    }

    /// Right-orthogonalize cores 2..d by an LQ sweep; ranks may shrink.
    pub fn right_orthogonalize(&mut self) {
        let d = self.order();
        for mu in (1..d).rev() {
            let n = self.cores[mu].n;
            let (q, r) = qr_economy(&self.cores[mu].right_unfolding().transpose());
            self.cores[mu] = Core3::from_right_unfolding(q.transpose(), n).unwrap();
            let prev = &self.cores[mu - 1];
            let pn = prev.n;
            let merged = prev.left_unfolding().matmul_t(&r);
            self.cores[mu - 1] = Core3::from_left_unfolding(merged, pn).unwrap();
        }
    }

    /// Frobenius norm computed through orthogonalization, which stays
    /// accurate when the represented tensor is a small difference.
    pub fn norm(&self) -> f64 {
        let mut t = self.clone();
        t.left_orthogonalize();
        t.cores[t.order() - 1].frobenius_norm()
    }

    /// Whether cores 1..d−1 satisfy `(C_µ^L)ᵀ C_µ^L = I` to `tol`.
    pub fn left_orthogonality_defect(&self) -> f64 {
        self.cores[..self.order() - 1]
            .iter()
            .map(|c| {
                let l = c.left_unfolding();
                l.t_matmul(&l).sub(&Matrix::identity(c.right)).frobenius_norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Left interface of a core prefix: `(n_1⋯n_k) × r_k`.
pub(crate) fn left_interface_of(cores: &[Core3]) -> Matrix {
    let mut acc = Matrix::filled(1, 1, 1.0);
    for core in cores {
        let rows = acc.rows() * core.n;
        acc = acc
            .matmul(&core.right_unfolding())
            .reshape(rows, core.right)
            .unwrap();
    }
    acc
}

/// Right interface of a core suffix: `(n_{k+1}⋯n_d) × r_k`.
pub(crate) fn right_interface_of(cores: &[Core3]) -> Matrix {
    let mut acc = Matrix::filled(1, 1, 1.0);
    for core in cores.iter().rev() {
        let cols = core.n * acc.rows();
        acc = core
            .left_unfolding()
            .matmul_t(&acc)
            .reshape(core.left, cols)
            .unwrap()
            .transpose();
    }
    acc
}

/// Σ over all entries of `a ⊙ b`, by a left-to-right contraction sweep.
pub fn tt_inner(a: &TtTensor, b: &TtTensor) -> Result<f64> {
    a.shape.check_same(&b.shape)?;
    let mut m = Matrix::filled(1, 1, 1.0);
    for (ca, cb) in a.cores.iter().zip(&b.cores) {
        // P = Mᵀ · A^R  →  (rb·n) × ra'
        let p = m
            .t_matmul(&ca.right_unfolding())
            .reshape(cb.left * ca.n, ca.right)
            .unwrap();
        m = p.t_matmul(&cb.left_unfolding());
    }
    Ok(m[(0, 0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::test_util::random_tt;

    const CAP: usize = 10_000_000;

    #[test]
    fn all_ones_rank_one_tt() {
        let shape = Shape::new(vec![2, 3, 2]).unwrap();
        let cores = shape
            .dims()
            .iter()
            .map(|&n| Core3::new(1, n, 1, vec![1.0; n]).unwrap())
            .collect();
        let t = TtTensor::new(cores).unwrap();
        assert_eq!(t.entry(&[2, 3, 1]).unwrap(), 1.0);
        assert_eq!(tt_inner(&t, &t).unwrap(), 12.0);
        let (l, r) = t.interface_matrices(1, CAP).unwrap();
        assert_eq!(l, Matrix::filled(2, 1, 1.0));
        assert_eq!(r, Matrix::filled(6, 1, 1.0));
    }

    #[test]
    fn rejects_inconsistent_ranks() {
        let cores = vec![Core3::zeros(1, 2, 2), Core3::zeros(3, 2, 1)];
        assert!(TtTensor::new(cores).is_err());
        let cores = vec![Core3::zeros(2, 2, 2), Core3::zeros(2, 2, 1)];
        assert!(TtTensor::new(cores).is_err());
    }

    #[test]
    fn identity_slice_cores_match_dense() {
        // cores whose slices are identity/permutation matrices of size 2
        let mut c1 = Core3::zeros(1, 2, 2);
        *c1.get_mut(0, 0, 0) = 1.0;
        *c1.get_mut(0, 1, 1) = 1.0;
        let mut c2 = Core3::zeros(2, 2, 2);
        for a in 0..2 {
            *c2.get_mut(a, 0, a) = 1.0;
            *c2.get_mut(a, 1, 1 - a) = 2.0;
        }
        let mut c3 = Core3::zeros(2, 2, 1);
        *c3.get_mut(0, 0, 0) = 3.0;
        *c3.get_mut(1, 1, 0) = 5.0;
        let t = TtTensor::new(vec![c1, c2, c3]).unwrap();
        // (1,2,2): e_0 · [[0,2],[2,0]] → 2e_1 · c3[:,1] = 2·5
        assert_eq!(t.entry(&[1, 2, 2]).unwrap(), 10.0);
        let dense = t.to_dense(CAP).unwrap();
        for off in 0..8 {
            let idx0 = dense.shape().multi_index(off);
            let idx: Vec<usize> = idx0.iter().map(|i| i + 1).collect();
            assert_eq!(dense.values()[off], t.entry(&idx).unwrap());
        }
    }

    #[test]
    fn interfaces_factor_the_unfolding_and_nest() {
        let t = random_tt(&[3, 4, 2, 3], &[2, 3, 2], 5);
        let dense = t.to_dense(CAP).unwrap();
        for mu in 1..4 {
            let (l, r) = t.interface_matrices(mu, CAP).unwrap();
            let unf = dense.unfold(mu).unwrap();
            let res = l.matmul_t(&r).sub(&unf).frobenius_norm();
            assert!(res <= 1e-12 * unf.frobenius_norm());
        }
        let l1 = t.left_interface(1);
        let l2 = t.left_interface(2);
        let nested = l1.kron(&Matrix::identity(4)).matmul(&t.core(2).left_unfolding());
        assert!(nested.sub(&l2).max_abs() <= 1e-15 * l2.max_abs().max(1.0));
        let r2 = t.right_interface(2);
        let r1 = t.right_interface(1);
        let nested = Matrix::identity(4)
            .kron(&r2)
            .matmul(&t.core(2).right_unfolding().transpose());
        assert!(nested.sub(&r1).max_abs() <= 1e-14 * r1.max_abs().max(1.0));
    }

    #[test]
    fn inner_product_matches_dense_and_is_symmetric() {
        let a = random_tt(&[4, 3, 5], &[2, 3], 1);
        let b = random_tt(&[4, 3, 5], &[3, 2], 2);
        let dense = a.to_dense(CAP).unwrap().dot(&b.to_dense(CAP).unwrap()).unwrap();
        let ab = tt_inner(&a, &b).unwrap();
        assert!((ab - dense).abs() <= 1e-12 * dense.abs());
        assert!((ab - tt_inner(&b, &a).unwrap()).abs() <= 1e-14 * ab.abs());
        assert!(tt_inner(&a, &a).unwrap() >= 0.0);
    }

    #[test]
    fn add_and_norm() {
        let a = random_tt(&[3, 3, 3], &[2, 2], 3);
        let b = random_tt(&[3, 3, 3], &[1, 3], 4);
        let s = a.add(&b).unwrap();
        let mut dense = a.to_dense(CAP).unwrap();
        dense.add_assign(&b.to_dense(CAP).unwrap()).unwrap();
        assert!(s.to_dense(CAP).unwrap().sub(&dense).unwrap().norm() <= 1e-14 * dense.norm());
        assert!((s.norm() - dense.norm()).abs() <= 1e-13 * dense.norm());
        assert!(a.sub(&a).unwrap().norm() <= 1e-15 * a.norm());
    }

    #[test]
    fn orthogonalization_preserves_tensor() {
        let t = random_tt(&[3, 4, 3, 2], &[3, 5, 2], 8);
        let dense = t.to_dense(CAP).unwrap();
        let mut l = t.clone();
        l.left_orthogonalize();
        assert!(l.left_orthogonality_defect() <= 1e-13);
        assert!(l.to_dense(CAP).unwrap().sub(&dense).unwrap().norm() <= 1e-13 * dense.norm());
        let mut r = t.clone();
        r.right_orthogonalize();
        assert!(r.to_dense(CAP).unwrap().sub(&dense).unwrap().norm() <= 1e-13 * dense.norm());
        for c in &r.cores()[1..] {
            let m = c.right_unfolding();
            assert!(m.matmul_t(&m).sub(&Matrix::identity(c.left())).frobenius_norm() <= 1e-13);
        }
    }

    #[test]
    fn dense_cap_is_enforced() {
        let t = random_tt(&[10, 10, 10], &[2, 2], 1);
        assert!(matches!(t.to_dense(999), Err(Error::CapExceeded { .. })));
    }
}
