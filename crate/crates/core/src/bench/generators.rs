//! Test tensors for the benchmark experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{svd, Matrix};
use crate::tensor::{Core3, CpTensor, DenseTensor, RankTuple, Shape, SparseTensor, StructuredTensor, TtTensor};

/// `1 / (i_1 + ⋯ + i_d − d + 1)` with 1-based indices.
pub fn gen_hilbert(d: usize, n: usize) -> Result<DenseTensor> {
    if d < 2 {
        return Err(Error::InvalidShape(format!("Hilbert tensor needs order at least 2, got {d}")));
    }
    let shape = Shape::uniform(d, n)?;
    // 0-based indices already sum to Σi − d.
    Ok(DenseTensor::from_fn(shape, |idx| 1.0 / (idx.iter().sum::<usize>() + 1) as f64))
}

/// `sqrt(Σ_j ((n−i_j)a + (i_j−1)b) / (n−1))` with 1-based indices.
pub fn gen_sqrt_sum(d: usize, n: usize, a: f64, b: f64) -> Result<DenseTensor> {
    if n < 2 {
        return Err(Error::InvalidShape(format!("square-root tensor needs n at least 2, got {n}")));
    }
    if !(0.0 < a && a < b) {
        return Err(Error::Config(format!("need 0 < a < b, got a={a}, b={b}")));
    }
    let shape = Shape::uniform(d, n)?;
    let step = (b - a) / (n - 1) as f64;
    Ok(DenseTensor::from_fn(shape, |idx| {
        idx.iter().map(|&i| a + i as f64 * step).sum::<f64>().sqrt()
    }))
}

/// Target singular values of a bond of size `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SigmaProfile {
    Flat(f64),
    /// Geometric from `max` down to `min`.
    Exponential { max: f64, min: f64 },
}

impl SigmaProfile {
    pub fn values(&self, k: usize) -> Vec<f64> {
        match *self {
            SigmaProfile::Flat(s) => vec![s; k],
            SigmaProfile::Exponential { max, min } => {
                if k == 1 {
                    return vec![max];
                }
                let ratio = (min / max).ln() / (k - 1) as f64;
                (0..k).map(|j| max * (ratio * j as f64).exp()).collect()
            }
        }
    }
}

const PROFILE_SWEEPS: usize = 6;

/// Random TT of rank `r` (clipped at the borders) whose unfoldings have
/// approximately the singular values `profile`.
///
/// Starting from a random TT, each sweep moves the orthogonality center
/// across every bond and replaces the bond's singular values by the target.
/// The bond last visited matches exactly; the others drift slightly.
pub fn gen_decaying_tt(d: usize, n: usize, r: usize, profile: SigmaProfile, seed: u64) -> Result<TtTensor> {
    if r == 0 {
        return Err(Error::InvalidRanks("rank must be positive".into()));
    }
    let shape = Shape::uniform(d, n)?;
    let ranks = RankTuple::clipped(&shape, r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = random_tt(&shape, &ranks, 1.0, &mut rng)?;
    x.left_orthogonalize();
    let mut cores = x.into_cores();
    for _ in 0..PROFILE_SWEEPS {
        for mu in (1..d).rev() {
            let target = profile.values(ranks.get(mu));
            let next = &cores[mu];
            let s = svd(&next.right_unfolding())?;
            let us = scale_columns(s.u, &target);
            cores[mu] = Core3::from_right_unfolding(s.vt, next.n())?;
            let prev = &cores[mu - 1];
            cores[mu - 1] = Core3::from_left_unfolding(prev.left_unfolding().matmul(&us), prev.n())?;
        }
        for mu in 1..d {
            let target = profile.values(ranks.get(mu));
            let cur = &cores[mu - 1];
            let s = svd(&cur.left_unfolding())?;
            let sv = scale_rows(s.vt, &target);
            cores[mu - 1] = Core3::from_left_unfolding(s.u, cur.n())?;
            let next = &cores[mu];
            cores[mu] = Core3::from_right_unfolding(sv.matmul(&next.right_unfolding()), next.n())?;
        }
    }
    TtTensor::new(cores)
}

fn scale_columns(mut m: Matrix, s: &[f64]) -> Matrix {
    let cols = m.cols();
    for (j, v) in m.as_mut_slice().iter_mut().enumerate() {
        *v *= s[j % cols];
    }
    m
}

fn scale_rows(mut m: Matrix, s: &[f64]) -> Matrix {
    for (i, &si) in s.iter().enumerate() {
        m.row_mut(i).iter_mut().for_each(|v| *v *= si);
    }
    m
}

fn sample_normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// TT with i.i.d. `N(0, std²)` core entries.
fn random_tt(shape: &Shape, ranks: &RankTuple, std: f64, rng: &mut ChaCha8Rng) -> Result<TtTensor> {
    let d = shape.order();
    let bond = |mu: usize| if mu == 0 || mu == d { 1 } else { ranks.get(mu) };
    let cores = (0..d)
        .map(|mu| {
            let (a, n, b) = (bond(mu), shape.mode(mu + 1), bond(mu + 1));
            let data = (0..a * n * b)
                .map(|_| std * sample_normal(rng))
                .collect::<Vec<f64>>();
            Core3::new(a, n, b, data)
        })
        .collect::<Result<Vec<_>>>()?;
    TtTensor::new(cores)
}

/// Rank-5 TT on `10^5` plus a sparse tensor with 100 entries of tiny,
/// log-uniformly spread magnitudes.
pub fn gen_tt_plus_sparse(seed: u64) -> Result<StructuredTensor> {
    tt_plus_sparse(5, 10, 5, 100, seed)
}

pub(crate) fn tt_plus_sparse(d: usize, n: usize, r: usize, nnz: usize, seed: u64) -> Result<StructuredTensor> {
    let shape = Shape::uniform(d, n)?;
    if nnz > shape.numel() {
        return Err(Error::Config(format!("{nnz} nonzeros do not fit in {shape}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tt = random_tt(&shape, &RankTuple::clipped(&shape, r)?, 1.0 / r as f64, &mut rng)?;
    let mut offsets = rand::seq::index::sample(&mut rng, shape.numel(), nnz).into_vec();
    offsets.sort_unstable();
    let mut indices = Vec::with_capacity(nnz * d);
    let mut values = Vec::with_capacity(nnz);
    for off in offsets {
        let std = 10f64.powf(rng.random_range(-20.0..-3.0));
        values.push(std * sample_normal(&mut rng));
        indices.extend(shape.multi_index(off));
    }
    let sparse = SparseTensor::from_raw(shape, indices, values);
    StructuredTensor::sum(vec![tt.into(), sparse.into()])
}

/// `Σ_{i<20} 10^{−i} T_i` with rank-3 TTs on `10^5`.
pub fn gen_sum_of_tt(seed: u64) -> Result<StructuredTensor> {
    sum_of_tt(5, 10, 3, 20, 10.0, seed)
}

pub(crate) fn sum_of_tt(d: usize, n: usize, r: usize, count: usize, decay: f64, seed: u64) -> Result<StructuredTensor> {
    let shape = Shape::uniform(d, n)?;
    let ranks = RankTuple::clipped(&shape, r)?;
    let std = 1.0 / (r as f64 * (n as f64).sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let members = (0..count)
        .map(|i| {
            let mut tt = random_tt(&shape, &ranks, std, &mut rng)?;
            tt.cores_mut()[0].scale(decay.powi(-(i as i32)));
            Ok(tt.into())
        })
        .collect::<Result<Vec<_>>>()?;
    StructuredTensor::sum(members)
}

/// `Σ_{i≤100} i^{−5} v_{1,i} ⊗ ⋯ ⊗ v_{5,i}` with unit Gaussian vectors in `R^10`.
pub fn gen_random_cp(seed: u64) -> Result<CpTensor> {
    random_cp(5, 10, 100, 5.0, seed)
}

pub(crate) fn random_cp(d: usize, n: usize, terms: usize, decay: f64, seed: u64) -> Result<CpTensor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors: Vec<Matrix> = (0..d)
        .map(|_| {
            let mut f = Matrix::from_fn(terms, n, |_, _| sample_normal(&mut rng));
            for k in 0..terms {
                let row = f.row_mut(k);
                let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                row.iter_mut().for_each(|v| *v /= norm);
            }
            f
        })
        .collect();
    for k in 0..terms {
        let w = ((k + 1) as f64).powf(-decay);
        factors[0].row_mut(k).iter_mut().for_each(|v| *v *= w);
    }
    CpTensor::new(factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::DEFAULT_MATERIALIZATION_CAP as CAP;

    #[test]
    fn hilbert_entries() {
        let t = gen_hilbert(3, 4).unwrap();
        assert_eq!(t.at(&[1, 1, 1]).unwrap(), 1.0);
        assert_eq!(t.at(&[2, 1, 1]).unwrap(), 0.5);
        assert_eq!(t.at(&[4, 3, 2]).unwrap(), 1.0 / 7.0);
        assert!(gen_hilbert(1, 4).is_err());
        assert_eq!(gen_hilbert(7, 5).unwrap().shape().numel(), 78_125);
    }

    #[test]
    fn sqrt_sum_entries() {
        let t = gen_sqrt_sum(5, 10, 0.2, 2.0).unwrap();
        assert!((t.at(&[1; 5]).unwrap() - 1.0).abs() < 1e-15);
        assert!((t.at(&[10; 5]).unwrap() - 10f64.sqrt()).abs() < 1e-14);
        let mid = t.at(&[4, 1, 1, 1, 1]).unwrap();
        assert!((mid - (0.8f64 + 6.0 / 9.0 * 0.2 + 3.0 / 9.0 * 2.0).sqrt()).abs() < 1e-14);
        assert!(gen_sqrt_sum(3, 1, 0.2, 2.0).is_err());
        assert!(gen_sqrt_sum(3, 4, 2.0, 0.2).is_err());
        assert!(gen_sqrt_sum(3, 4, 0.0, 2.0).is_err());
    }

    fn unfolding_sigmas(t: &TtTensor, mu: usize) -> Vec<f64> {
        svd(&t.to_dense(CAP).unwrap().unfold(mu).unwrap()).unwrap().singular_values
    }

    #[test]
    fn flat_profile_within_ten_percent() {
        for seed in 0..5 {
            let t = gen_decaying_tt(3, 6, 3, SigmaProfile::Flat(1.0), seed).unwrap();
            for mu in 1..3 {
                let s = unfolding_sigmas(&t, mu);
                for &v in &s[..3] {
                    assert!((v - 1.0).abs() <= 0.1, "seed {seed} mode {mu}: {s:?}");
                }
                assert!(s[3..].iter().all(|&v| v < 1e-12));
            }
        }
    }

    /// Coefficient of determination of the least-squares line through `ys`.
    fn r_squared(ys: &[f64]) -> f64 {
        let n = ys.len() as f64;
        let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64).collect();
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        sxy * sxy / (sxx * syy)
    }

    #[test]
    fn exponential_profile_is_log_linear() {
        let profile = SigmaProfile::Exponential { max: 1.0, min: 1e-10 };
        let t = gen_decaying_tt(4, 8, 6, profile, 7).unwrap();
        for mu in 1..4 {
            let s = unfolding_sigmas(&t, mu);
            let logs: Vec<f64> = s[..6].iter().map(|v| v.log10()).collect();
            assert!(r_squared(&logs) > 0.95, "mode {mu}: {s:?}");
            assert!((s[0] - 1.0).abs() < 0.5);
        }
    }

    #[test]
    fn decaying_tt_is_reproducible_and_clipped() {
        let p = SigmaProfile::Exponential { max: 30f64.sqrt(), min: 30f64.sqrt() * 1e-20 };
        let a = gen_decaying_tt(5, 10, 30, p, 3).unwrap();
        assert_eq!(a, gen_decaying_tt(5, 10, 30, p, 3).unwrap());
        assert_eq!(a.ranks().as_slice(), &[10, 30, 30, 10]);
        assert!(gen_decaying_tt(3, 4, 0, p, 0).is_err());
    }

    #[test]
    fn tt_plus_sparse_recipe() {
        let t = gen_tt_plus_sparse(1).unwrap();
        assert_eq!(t.shape().dims(), &[10; 5]);
        let members = t.summands();
        assert_eq!(members.len(), 2);
        let StructuredTensor::Tt(tt) = &members[0] else { panic!("first member is not a TT") };
        assert_eq!(tt.ranks().as_slice(), &[5, 5, 5, 5]);
        let StructuredTensor::Sparse(s) = &members[1] else { panic!("second member is not sparse") };
        assert_eq!(s.nnz(), 100);
        assert!(s.values().iter().all(|v| v.abs() < 1e-1));
        assert_eq!(gen_tt_plus_sparse(1).unwrap(), t);
    }

    #[test]
    fn sum_of_tt_recipe() {
        let t = gen_sum_of_tt(2).unwrap();
        assert_eq!(t.shape().dims(), &[10; 5]);
        let members = t.summands();
        assert_eq!(members.len(), 20);
        let norms: Vec<f64> = members.iter().map(|m| m.norm(CAP).unwrap()).collect();
        for m in members {
            let StructuredTensor::Tt(tt) = m else { panic!("member is not a TT") };
            assert_eq!(tt.ranks().as_slice(), &[3, 3, 3, 3]);
        }
        // Weights 10^{−i}: consecutive norms drop by roughly a decade.
        let drop = (norms[0] / norms[19]).log10() / 19.0;
        assert!((drop - 1.0).abs() < 0.15, "{drop}");
    }

    #[test]
    fn random_cp_recipe() {
        let t = gen_random_cp(3).unwrap();
        assert_eq!(t.n_terms(), 100);
        assert_eq!(t.shape().dims(), &[10; 5]);
        let row_norm = |f: &Matrix, k: usize| f.row(k).iter().map(|v| v * v).sum::<f64>().sqrt();
        for f in &t.factors()[1..] {
            assert!((0..100).all(|k| (row_norm(f, k) - 1.0).abs() < 1e-14));
        }
        let f0 = &t.factors()[0];
        assert!((row_norm(f0, 0) / row_norm(f0, 1) - 32.0).abs() < 1e-12);
        assert!((row_norm(f0, 99) - 100f64.powi(-5)).abs() < 1e-24);
    }
}
