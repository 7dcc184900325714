#![allow(dead_code)]

mod vectors;

#[allow(unused_imports)]
pub use vectors::replay_hash_vectors;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use tt_sketch::linalg::Matrix;
use tt_sketch::tensor::{Core3, CpTensor, DenseTensor, Shape, SparseTensor, TtTensor, TuckerTensor};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut r = rng(seed);
    Matrix::from_fn(rows, cols, |_, _| normal(&mut r))
}

pub fn random_dense(dims: &[usize], seed: u64) -> DenseTensor {
    let mut r = rng(seed);
    DenseTensor::from_fn(Shape::new(dims.to_vec()).unwrap(), |_| normal(&mut r))
}

/// TT with standard normal cores; `ranks` has one entry per inner bond.
pub fn random_tt(dims: &[usize], ranks: &[usize], seed: u64) -> TtTensor {
    let mut r = rng(seed);
    let d = dims.len();
    let bond = |mu: usize| if mu == 0 || mu == d { 1 } else { ranks[mu - 1] };
    let cores = (0..d)
        .map(|mu| {
            let (a, n, b) = (bond(mu), dims[mu], bond(mu + 1));
            Core3::new(a, n, b, (0..a * n * b).map(|_| normal(&mut r)).collect()).unwrap()
        })
        .collect();
    TtTensor::new(cores).unwrap()
}

pub fn random_sparse(dims: &[usize], nnz: usize, seed: u64) -> SparseTensor {
    let shape = Shape::new(dims.to_vec()).unwrap();
    let mut r = rng(seed);
    let offsets = rand::seq::index::sample(&mut r, shape.numel(), nnz.min(shape.numel()));
    let entries = offsets
        .into_iter()
        .map(|off| {
            let idx = shape.multi_index(off).into_iter().map(|i| i + 1).collect();
            (idx, normal(&mut r))
        })
        .collect();
    SparseTensor::new(shape, entries).unwrap()
}

pub fn random_cp(dims: &[usize], terms: usize, seed: u64) -> CpTensor {
    let factors = dims
        .iter()
        .enumerate()
        .map(|(k, &n)| gaussian_matrix(terms, n, seed + k as u64))
        .collect();
    CpTensor::new(factors).unwrap()
}

pub fn random_tucker(dims: &[usize], core_dims: &[usize], seed: u64) -> TuckerTensor {
    let core = random_dense(core_dims, seed);
    let factors = dims
        .iter()
        .zip(core_dims)
        .enumerate()
        .map(|(k, (&n, &c))| gaussian_matrix(n, c, seed + 1 + k as u64))
        .collect();
    TuckerTensor::new(core, factors).unwrap()
}

/// `|a − b|` relative to `max(|b|, floor)`.
pub fn rel_diff(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}
