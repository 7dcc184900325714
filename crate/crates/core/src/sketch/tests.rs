use super::*;
use crate::drm::{DrmType, Side};
use crate::linalg::test_util::gaussian_matrix;
use crate::linalg::{pinv, DEFAULT_RTOL};
use crate::tensor::test_util::{random_dense, random_tt};
use crate::tensor::{rel_error, RankTuple, Shape};

const CAP: usize = DEFAULT_MATERIALIZATION_CAP;

fn ranks(v: &[usize]) -> RankTuple {
    RankTuple::new(v.to_vec()).unwrap()
}

fn chains(dims: &[usize], l: &[usize], r: &[usize], drm: DrmType, seed: u64) -> (DrmChain, DrmChain) {
    let shape = Shape::new(dims.to_vec()).unwrap();
    (
        drm.chain(&shape, &ranks(l), Side::Left, seed).unwrap(),
        drm.chain(&shape, &ranks(r), Side::Right, seed + 1000).unwrap(),
    )
}

/// The µ-th chain matrix with the boundary convention `Y_0 = X_d = [1]`.
fn chain_matrix(c: &DrmChain, mu: usize) -> Matrix {
    let d = c.shape().order();
    match (c.side(), mu) {
        (Side::Left, 0) => Matrix::filled(1, 1, 1.0),
        (Side::Right, m) if m == d => Matrix::filled(1, 1, 1.0),
        _ => c.matrix(mu, CAP).unwrap(),
    }
}

/// Sketches by explicit summation over every index.
fn brute_force(t: &DenseTensor, left: &DrmChain, right: &DrmChain) -> (Vec<Core3>, Vec<Matrix>) {
    let dims = t.shape().dims();
    let d = dims.len();
    let vals = t.values();
    let mut psi = Vec::new();
    for mu in 1..=d {
        let y = chain_matrix(left, mu - 1);
        let x = chain_matrix(right, mu);
        let n = dims[mu - 1];
        let p_size: usize = dims[..mu - 1].iter().product();
        let s_size: usize = dims[mu..].iter().product();
        let mut c = Core3::zeros(y.cols(), n, x.cols());
        for a in 0..y.cols() {
            for i in 0..n {
                for b in 0..x.cols() {
                    let mut acc = 0.0;
                    for p in 0..p_size {
                        for s in 0..s_size {
                            acc += y[(p, a)] * vals[(p * n + i) * s_size + s] * x[(s, b)];
                        }
                    }
                    *c.get_mut(a, i, b) = acc;
                }
            }
        }
        psi.push(c);
    }
    let mut omega = Vec::new();
    for mu in 1..d {
        let y = chain_matrix(left, mu);
        let x = chain_matrix(right, mu);
        let p_size: usize = dims[..mu].iter().product();
        let s_size: usize = dims[mu..].iter().product();
        let mut m = Matrix::zeros(y.cols(), x.cols());
        for a in 0..y.cols() {
            for b in 0..x.cols() {
                let mut acc = 0.0;
                for p in 0..p_size {
                    for s in 0..s_size {
                        acc += y[(p, a)] * vals[p * s_size + s] * x[(s, b)];
                    }
                }
                m[(a, b)] = acc;
            }
        }
        omega.push(m);
    }
    (psi, omega)
}

fn rel_diff(a: &SketchPack, b: &SketchPack) -> f64 {
    a.max_abs_diff(b) / a.max_abs().max(f64::MIN_POSITIVE)
}

#[test]
fn dense_sketch_matches_brute_force() {
    let dims = [3, 3, 3, 3];
    let t = random_dense(&dims, 1);
    for drm in [DrmType::Gaussian, DrmType::Tt] {
        let (l, r) = chains(&dims, &[4, 4, 4], &[2, 2, 2], drm, 7);
        let pack = sketch_dense(&t, &l, &r).unwrap();
        let (psi, omega) = brute_force(&t, &l, &r);
        let scale = pack.max_abs();
        for (a, b) in pack.psis().iter().zip(&psi) {
            assert_eq!(a.dims(), b.dims());
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                assert!((x - y).abs() <= 1e-12 * scale, "{drm}: {x} vs {y}");
            }
        }
        for (a, b) in pack.omegas().iter().zip(&omega) {
            assert!(a.sub(b).max_abs() <= 1e-12 * scale);
        }
    }
}

#[test]
fn zero_and_scaled_inputs() {
    let dims = [3, 3, 3, 3];
    let (l, r) = chains(&dims, &[4, 4, 4], &[2, 2, 2], DrmType::Gaussian, 3);
    let zero = DenseTensor::zeros(Shape::new(dims.to_vec()).unwrap());
    assert_eq!(sketch_dense(&zero, &l, &r).unwrap().max_abs(), 0.0);

    let t = random_dense(&dims, 2);
    let mut t2 = t.clone();
    t2.scale(2.5);
    let mut a = sketch_dense(&t, &l, &r).unwrap();
    a.scale(2.5);
    let b = sketch_dense(&t2, &l, &r).unwrap();
    assert!(rel_diff(&a, &b) <= 1e-15);
}

fn random_sparse(dims: &[usize], nnz: usize, seed: u64) -> SparseTensor {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let shape = Shape::new(dims.to_vec()).unwrap();
    let mut seen = std::collections::HashSet::new();
    let mut entries = Vec::new();
    while entries.len() < nnz {
        let idx: Vec<usize> = dims.iter().map(|&n| rng.random_range(1..=n)).collect();
        if seen.insert(idx.clone()) {
            entries.push((idx, rng.random_range(-1.0..1.0)));
        }
    }
    SparseTensor::new(shape, entries).unwrap()
}

#[test]
fn sparse_matches_dense_path() {
    let dims = [5, 5, 5, 5, 5];
    let s = random_sparse(&dims, 100, 4);
    let dense = s.to_dense(CAP).unwrap();
    for drm in [DrmType::Gaussian, DrmType::Tt] {
        let (l, r) = chains(&dims, &[6, 6, 6, 6], &[3, 3, 3, 3], drm, 11);
        let a = sketch_sparse(&s, &l, &r).unwrap();
        let b = sketch_dense(&dense, &l, &r).unwrap();
        assert!(rel_diff(&b, &a) <= 1e-12, "{drm}: {}", rel_diff(&b, &a));
    }
}

#[test]
fn single_entry_sparse_is_outer_product() {
    let dims = [3, 4, 2];
    let shape = Shape::new(dims.to_vec()).unwrap();
    let s = SparseTensor::new(shape, vec![(vec![2, 3, 1], 1.5)]).unwrap();
    let (l, r) = chains(&dims, &[3, 3], &[2, 2], DrmType::Gaussian, 5);
    let pack = sketch_sparse(&s, &l, &r).unwrap();
    let y1 = l.row(1, &[2]).unwrap();
    let x1 = r.row(1, &[3, 1]).unwrap();
    let om = pack.omega(1);
    for a in 0..3 {
        for b in 0..2 {
            assert!((om[(a, b)] - 1.5 * y1[a] * x1[b]).abs() < 1e-14);
        }
    }
    let empty = SparseTensor::new(Shape::new(dims.to_vec()).unwrap(), vec![]).unwrap();
    assert_eq!(sketch_sparse(&empty, &l, &r).unwrap().max_abs(), 0.0);
}

#[test]
fn tt_kernel_matches_dense_path() {
    let dims = [4, 4, 4, 4];
    let t = random_tt(&dims, &[3, 3, 3], 6);
    let dense = t.to_dense(CAP).unwrap();
    let (l, r) = chains(&dims, &[5, 5, 5], &[2, 2, 2], DrmType::Tt, 8);
    let a = sketch_tt(&t, &l, &r).unwrap();
    let b = sketch_dense(&dense, &l, &r).unwrap();
    assert!(rel_diff(&b, &a) <= 1e-11);

    let mut t2 = t.clone();
    t2.cores_mut()[1].scale(2.0);
    let mut a2 = sketch_tt(&t2, &l, &r).unwrap();
    a2.scale(0.5);
    assert!(rel_diff(&a, &a2) <= 1e-15);

    let (gl, gr) = chains(&dims, &[5, 5, 5], &[2, 2, 2], DrmType::Gaussian, 8);
    assert!(matches!(sketch_tt(&t, &gl, &gr), Err(Error::Unsupported(_))));
}

#[test]
fn rank_one_ones_tt_with_rank_one_chains() {
    let ones = |n| Core3::new(1, n, 1, vec![1.0; n]).unwrap();
    let t = TtTensor::new(vec![ones(2), ones(2)]).unwrap();
    let shape = t.shape().clone();
    let b = Core3::new(1, 2, 1, vec![0.5, -2.0]).unwrap();
    let a = Core3::new(1, 2, 1, vec![3.0, 1.0]).unwrap();
    let l = DrmChain::from_tt_cores(&shape, Side::Left, vec![b], 0).unwrap();
    let r = DrmChain::from_tt_cores(&shape, Side::Right, vec![a], 0).unwrap();
    let pack = sketch_tt(&t, &l, &r).unwrap();
    // Ω_1 = (Σ_i B[i]) (Σ_j A[j]) for the all-ones tensor.
    assert!((pack.omega(1)[(0, 0)] - (-1.5 * 4.0)).abs() < 1e-14);
    assert!((pack.psi(1).get(0, 1, 0) - 4.0).abs() < 1e-14);
    assert!((pack.psi(2).get(0, 0, 0) - -1.5).abs() < 1e-14);
}

fn random_cp(dims: &[usize], terms: usize, seed: u64) -> CpTensor {
    let factors = dims
        .iter()
        .enumerate()
        .map(|(k, &n)| gaussian_matrix(terms, n, seed + k as u64))
        .collect();
    CpTensor::new(factors).unwrap()
}

#[test]
fn cp_kernel_matches_dense_path_and_is_additive() {
    let dims = [4, 4, 4, 4];
    let (l, r) = chains(&dims, &[5, 5, 5], &[2, 2, 2], DrmType::Tt, 9);
    for terms in [1, 7] {
        let t = random_cp(&dims, terms, 20);
        let a = sketch_cp(&t, &l, &r).unwrap();
        let b = sketch_dense(&t.to_dense(CAP).unwrap(), &l, &r).unwrap();
        assert!(rel_diff(&b, &a) <= 1e-11);
        if terms == 7 {
            let parts: Vec<SketchPack> = (0..terms)
                .map(|j| {
                    let f = t.factors().iter().map(|m| m.row_range(j, j + 1)).collect();
                    sketch_cp(&CpTensor::new(f).unwrap(), &l, &r).unwrap()
                })
                .collect();
            assert!(rel_diff(&a, &sketch_sum(&parts).unwrap()) <= 1e-13);
        }
    }
}

#[test]
fn tucker_kernel_matches_dense_and_cp_paths() {
    let dims = [4, 3, 4, 3];
    let core_dims = [2, 3, 2, 2];
    let (l, r) = chains(&dims, &[5, 5, 5], &[2, 2, 2], DrmType::Tt, 10);
    let core = random_dense(&core_dims, 30);
    let factors: Vec<Matrix> = dims
        .iter()
        .zip(&core_dims)
        .enumerate()
        .map(|(k, (&n, &s))| gaussian_matrix(n, s, 40 + k as u64))
        .collect();
    let t = TuckerTensor::new(core, factors.clone()).unwrap();
    let a = sketch_tucker(&t, &l, &r).unwrap();
    let b = sketch_dense(&t.to_dense(CAP).unwrap(), &l, &r).unwrap();
    assert!(rel_diff(&b, &a) <= 1e-11);

    // A superdiagonal core makes the Tucker tensor a CP tensor.
    let s = 2;
    let diag_core = DenseTensor::from_fn(Shape::uniform(4, s).unwrap(), |idx| {
        if idx.iter().all(|&i| i == idx[0]) {
            1.0 + idx[0] as f64
        } else {
            0.0
        }
    });
    let fs: Vec<Matrix> = dims.iter().enumerate().map(|(k, &n)| gaussian_matrix(n, s, 60 + k as u64)).collect();
    let tucker = TuckerTensor::new(diag_core, fs.clone()).unwrap();
    let mut cp_factors: Vec<Matrix> = fs.iter().map(Matrix::transpose).collect();
    cp_factors[0].row_mut(1).iter_mut().for_each(|v| *v *= 2.0);
    let cp = CpTensor::new(cp_factors).unwrap();
    let x = sketch_tucker(&tucker, &l, &r).unwrap();
    let y = sketch_cp(&cp, &l, &r).unwrap();
    assert!(rel_diff(&y, &x) <= 1e-11);

    let zero = TuckerTensor::new(DenseTensor::zeros(Shape::new(core_dims.to_vec()).unwrap()), factors).unwrap();
    assert_eq!(sketch_tucker(&zero, &l, &r).unwrap().max_abs(), 0.0);
}

#[test]
fn structured_inputs_with_gaussian_chains_fall_back_to_dense() {
    let dims = [3, 3, 3, 3];
    let t = random_tt(&dims, &[2, 2, 2], 12);
    let (l, r) = chains(&dims, &[4, 4, 4], &[2, 2, 2], DrmType::Gaussian, 13);
    let a = sketch(&t.clone().into(), &l, &r).unwrap();
    let b = sketch_dense(&t.to_dense(CAP).unwrap(), &l, &r).unwrap();
    assert!(rel_diff(&b, &a) <= 1e-12);
    let err = sketch_with_cap(&t.into(), &l, &r, 10).unwrap_err();
    assert!(matches!(err, Error::Unsupported(_)));
}

#[test]
fn sum_is_sketched_by_members() {
    let dims = [3, 3, 3, 3];
    let t1 = random_tt(&dims, &[2, 2, 2], 14);
    let t2 = random_sparse(&dims, 20, 15);
    let t3 = random_dense(&dims, 16);
    let mut total = t1.to_dense(CAP).unwrap();
    total.add_assign(&t2.to_dense(CAP).unwrap()).unwrap();
    total.add_assign(&t3).unwrap();
    let sum = StructuredTensor::sum(vec![t1.into(), t2.into(), t3.into()]).unwrap();
    for drm in [DrmType::Gaussian, DrmType::Tt] {
        let (l, r) = chains(&dims, &[4, 4, 4], &[2, 2, 2], drm, 17);
        let a = sketch(&sum, &l, &r).unwrap();
        let b = sketch_dense(&total, &l, &r).unwrap();
        assert!(rel_diff(&b, &a) <= 1e-13, "{drm}");
    }
}

#[test]
fn sketch_sum_order_and_fingerprints() {
    let dims = [3, 3, 3, 3];
    let (l, r) = chains(&dims, &[4, 4, 4], &[2, 2, 2], DrmType::Gaussian, 18);
    let parts: Vec<SketchPack> = (0..4)
        .map(|k| sketch_dense(&random_dense(&dims, 100 + k), &l, &r).unwrap())
        .collect();
    assert_eq!(sketch_sum(&parts[..1]).unwrap(), parts[0]);
    let fwd = sketch_sum(&parts).unwrap();
    let rev: Vec<SketchPack> = parts.iter().rev().cloned().collect();
    assert!(rel_diff(&fwd, &sketch_sum(&rev).unwrap()) <= 1e-14);

    let (l2, r2) = chains(&dims, &[4, 4, 4], &[2, 2, 2], DrmType::Gaussian, 19);
    let other = sketch_dense(&random_dense(&dims, 1), &l2, &r2).unwrap();
    assert!(matches!(
        sketch_sum(&[parts[0].clone(), other]),
        Err(Error::FingerprintMismatch)
    ));
    assert!(sketch_sum(&[]).is_err());
}

#[test]
fn pack_round_trips_through_bytes() {
    let dims = [3, 4, 2];
    let (l, r) = chains(&dims, &[3, 4], &[2, 2], DrmType::Tt, 20);
    let pack = sketch_dense(&random_dense(&dims, 3), &l, &r).unwrap();
    let mut buf = Vec::new();
    pack.write(&mut buf).unwrap();
    let back = SketchPack::read(&mut buf.as_slice()).unwrap();
    assert_eq!(back, pack);
    buf.push(0);
    assert!(SketchPack::read(&mut buf.as_slice()).is_err());
}

#[test]
fn partial_sketches_match_full_pack() {
    let dims = [3, 3, 3, 3];
    let t: StructuredTensor = random_tt(&dims, &[2, 2, 2], 21).into();
    for drm in [DrmType::Gaussian, DrmType::Tt] {
        let (l, r) = chains(&dims, &[4, 4, 4], &[2, 2, 2], drm, 22);
        let full = sketch(&t, &l, &r).unwrap();
        for mu in 1..=4 {
            let p = sketch_psi(&t, &l, &r, mu).unwrap();
            assert!(p.as_slice().iter().zip(full.psi(mu).as_slice()).all(|(a, b)| (a - b).abs() < 1e-12));
        }
        for mu in 1..4 {
            let o = sketch_omega(&t, &l, &r, mu).unwrap();
            assert!(o.sub(full.omega(mu)).max_abs() < 1e-12);
        }
        assert!(sketch_psi(&t, &l, &r, 5).is_err());
        assert!(sketch_omega(&t, &l, &r, 4).is_err());
    }
}

fn config(l: &[usize], r: &[usize], seed: u64, drm: DrmType) -> SttaConfig {
    SttaConfig::new(ranks(l), ranks(r), seed, drm).unwrap()
}

#[test]
fn order_two_matches_generalized_nystrom() {
    let (m, n) = (12, 9);
    let a = gaussian_matrix(m, 4, 1).matmul(&gaussian_matrix(4, n, 2)).add(&gaussian_matrix(m, n, 3).scaled(1e-2));
    let t = DenseTensor::new(Shape::new(vec![m, n]).unwrap(), a.as_slice().to_vec()).unwrap();
    let cfg = config(&[6], &[3], 5, DrmType::Gaussian);
    let (l, r) = cfg.chains(t.shape()).unwrap();
    let approx = assemble(&sketch_dense(&t, &l, &r).unwrap(), &cfg).unwrap();
    let x = r.matrix(1, CAP).unwrap();
    let y = l.matrix(1, CAP).unwrap();
    let ax = a.matmul(&x);
    let gn = ax.matmul(&pinv(&y.t_matmul(&ax), DEFAULT_RTOL).unwrap()).matmul(&y.t_matmul(&a));
    let got = approx.to_dense(CAP).unwrap();
    let diff = got.values().iter().zip(gn.as_slice()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    assert!(diff <= 1e-12 * gn.max_abs(), "{diff}");
    assert_eq!(approx.ranks().as_slice(), &[3]);
}

#[test]
fn exact_rank_inputs_are_recovered() {
    let dims = [4, 5, 4, 3];
    let t = random_tt(&dims, &[2, 3, 2], 31);
    let st: StructuredTensor = t.into();
    for drm in [DrmType::Gaussian, DrmType::Tt] {
        let cfg = config(&[5, 6, 5], &[2, 3, 2], 32, drm);
        let approx = stta_approximate(&st, &cfg).unwrap();
        assert!(rel_error(&st, &approx).unwrap() <= 1e-10, "{drm}");
        assert_eq!(approx.ranks().as_slice(), &[2, 3, 2]);
        let cfg = config(&[2, 3, 2], &[5, 6, 5], 33, drm);
        let approx = stta_approximate(&st, &cfg).unwrap();
        assert!(rel_error(&st, &approx).unwrap() <= 1e-10, "{drm} left");
        assert_eq!(approx.ranks().as_slice(), &[2, 3, 2]);
    }
}

#[test]
fn rank_one_input_is_exact_for_any_config() {
    let dims = [3, 4, 3, 2];
    let t: StructuredTensor = random_tt(&dims, &[1, 1, 1], 34).into();
    for (l, r) in [(&[3, 3, 3][..], &[1, 1, 1][..]), (&[2, 5, 2][..], &[4, 7, 4][..])] {
        let approx = stta_approximate(&t, &config(l, r, 35, DrmType::Gaussian)).unwrap();
        assert!(rel_error(&t, &approx).unwrap() <= 1e-10);
    }
}

#[test]
fn assemble_rejects_mismatched_config() {
    let dims = [3, 3, 3];
    let (l, r) = chains(&dims, &[4, 4], &[2, 2], DrmType::Gaussian, 1);
    let pack = sketch_dense(&random_dense(&dims, 1), &l, &r).unwrap();
    assert!(assemble(&pack, &config(&[5, 5], &[2, 2], 1, DrmType::Gaussian)).is_err());
    assert!(assemble_pack(&pack, DEFAULT_RTOL).is_ok());
}

/// `T X_µ Ω_µ⁺ Y_µᵀ` on the µ-th unfolding.
fn projector(t: &DenseTensor, l: &DrmChain, r: &DrmChain, mu: usize) -> Matrix {
    let tx = t.unfold(mu).unwrap().matmul(&r.matrix(mu, CAP).unwrap());
    let y = l.matrix(mu, CAP).unwrap();
    tx.matmul(&pinv(&y.t_matmul(&tx), DEFAULT_RTOL).unwrap()).matmul_t(&y)
}

/// `(P_1 ⊗ I)⋯(P_{k−1} ⊗ I)` acting on the rows of the k-th unfolding.
fn projector_chain(ps: &[Matrix], dims: &[usize], k: usize) -> Matrix {
    let rows: usize = dims[..k].iter().product();
    let mut acc = Matrix::identity(rows);
    for (alpha, p) in ps.iter().enumerate().take(k - 1) {
        let rest: usize = dims[alpha + 1..k].iter().product();
        acc = acc.matmul(&p.kron(&Matrix::identity(rest)));
    }
    acc
}

#[test]
fn approximation_has_projector_form_and_triangle_bound() {
    let dims = [3, 3, 3, 3];
    let d = dims.len();
    let t = random_dense(&dims, 41);
    for (lr, rr) in [([4, 5, 4], [2, 3, 2]), ([5, 6, 5], [3, 3, 3])] {
        let cfg = config(&lr, &rr, 42, DrmType::Gaussian);
        let (l, r) = cfg.chains(t.shape()).unwrap();
        let approx = assemble(&sketch_dense(&t, &l, &r).unwrap(), &cfg).unwrap();
        let ps: Vec<Matrix> = (1..d).map(|mu| projector(&t, &l, &r, mu)).collect();
        let form = projector_chain(&ps, &dims, d - 1)
            .matmul(&ps[d - 2])
            .matmul(&t.unfold(d - 1).unwrap());
        let got = approx.to_dense(CAP).unwrap();
        let diff = got.unfold(d - 1).unwrap().sub(&form).frobenius_norm();
        assert!(diff <= 1e-10 * t.norm(), "{diff}");

        let err = got.sub(&t).unwrap().norm();
        let bound: f64 = (1..d)
            .map(|mu| {
                let unf = t.unfold(mu).unwrap();
                let resid = unf.sub(&ps[mu - 1].matmul(&unf));
                projector_chain(&ps, &dims, mu).matmul(&resid).frobenius_norm()
            })
            .sum();
        assert!(err <= bound + 1e-10, "{err} > {bound}");
    }
}

#[test]
fn tt_left_chains_give_oblique_projectors() {
    let dims = [3, 3, 3, 3];
    let t = random_dense(&dims, 43);
    let shape = t.shape().clone();
    let l = DrmChain::tt(&shape, &ranks(&[2, 3, 2]), Side::Left, 44).unwrap();
    let r = DrmChain::gaussian(&shape, &ranks(&[3, 4, 3]), Side::Right, 45).unwrap();
    for mu in 1..4 {
        let p = projector(&t, &l, &r, mu);
        let defect = p.matmul(&p).sub(&p).frobenius_norm();
        assert!(defect <= 1e-8 * p.frobenius_norm(), "mode {mu}: {defect}");
    }
}

#[test]
fn block_extension_matches_direct_sketch() {
    let dims = [3, 3, 3, 3];
    let shape = Shape::new(dims.to_vec()).unwrap();
    let t: StructuredTensor = random_dense(&dims, 50).into();
    let l2 = DrmChain::gaussian(&shape, &ranks(&[2, 2, 2]), Side::Left, 51).unwrap();
    let r2 = DrmChain::gaussian(&shape, &ranks(&[2, 2, 2]), Side::Right, 52).unwrap();
    let l4 = l2.extend(&[2, 2, 2]).unwrap();
    let r4 = r2.extend(&[2, 2, 2]).unwrap();
    let old = sketch(&t, &l2, &r2).unwrap();
    let ext = sketch_block_extend(&old, &t, &l2, &r2, &l4, &r4).unwrap();
    let direct = sketch(&t, &l4, &r4).unwrap();
    assert!(direct.max_abs_diff(&ext) <= 1e-13 * direct.max_abs());
    for mu in 1..=4 {
        let o = old.psi(mu);
        assert_eq!(&ext.psi(mu).block(0, o.left(), 0, o.right()), o);
    }
    for mu in 1..4 {
        let o = old.omega(mu);
        for i in 0..o.rows() {
            assert_eq!(&ext.omega(mu).row(i)[..o.cols()], o.row(i));
        }
    }
    assert!(block_extend_flops(&t, &l2, &r2, &l4, &r4) < sketch_flops(&t, &l4, &r4));

    // Only one side grows.
    let ext_l = sketch_block_extend(&old, &t, &l2, &r2, &l4, &r2).unwrap();
    let direct_l = sketch(&t, &l4, &r2).unwrap();
    assert!(direct_l.max_abs_diff(&ext_l) <= 1e-13 * direct_l.max_abs());

    let same = sketch_block_extend(&old, &t, &l2, &r2, &l2.extend(&[0, 0, 0]).unwrap(), &r2).unwrap();
    assert_eq!(same, old);
}

#[test]
fn block_extension_rejects_unrelated_chains() {
    let dims = [3, 3, 3];
    let shape = Shape::new(dims.to_vec()).unwrap();
    let t: StructuredTensor = random_dense(&dims, 53).into();
    let l = DrmChain::gaussian(&shape, &ranks(&[2, 2]), Side::Left, 54).unwrap();
    let r = DrmChain::gaussian(&shape, &ranks(&[1, 1]), Side::Right, 55).unwrap();
    let old = sketch(&t, &l, &r).unwrap();
    let fresh = DrmChain::gaussian(&shape, &ranks(&[4, 4]), Side::Left, 56).unwrap();
    assert!(matches!(
        sketch_block_extend(&old, &t, &l, &r, &fresh, &r),
        Err(Error::Config(_))
    ));
    let other_old = DrmChain::gaussian(&shape, &ranks(&[2, 2]), Side::Left, 57).unwrap();
    assert!(matches!(
        sketch_block_extend(&old, &t, &other_old, &r, &other_old.extend(&[1, 1]).unwrap(), &r),
        Err(Error::FingerprintMismatch)
    ));
}

#[test]
fn sparse_block_extension() {
    let dims = [4, 4, 4];
    let shape = Shape::new(dims.to_vec()).unwrap();
    let t: StructuredTensor = random_sparse(&dims, 30, 58).into();
    let l = DrmChain::gaussian(&shape, &ranks(&[3, 3]), Side::Left, 59).unwrap();
    let r = DrmChain::gaussian(&shape, &ranks(&[2, 2]), Side::Right, 60).unwrap();
    let (l2, r2) = (l.extend(&[1, 3]).unwrap(), r.extend(&[2, 0]).unwrap());
    let old = sketch(&t, &l, &r).unwrap();
    let ext = sketch_block_extend(&old, &t, &l, &r, &l2, &r2).unwrap();
    let direct = sketch(&t, &l2, &r2).unwrap();
    assert!(direct.max_abs_diff(&ext) <= 1e-13 * direct.max_abs());
}
