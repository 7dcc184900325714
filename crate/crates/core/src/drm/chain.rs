//! Left and right families of dimension-reduction matrices.
//!
//! A left chain provides `Y_µ` of size `(n_1⋯n_µ) × r^L_µ` for µ = 0..d−1 and a
//! right chain provides `X_µ` of size `(n_{µ+1}⋯n_d) × r^R_µ` for µ = 1..d, with
//! `Y_0 = X_d = [1]`. Matrices are produced row by row on demand; `matrix`
//! materializes one for small problems.

use super::hash::{hash_to_normal, hashed_gaussian_row_into, mode_seed, splitmix64};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::tensor::{left_interface_of, right_interface_of, Core3, RankTuple, Shape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn tag(self) -> u64 {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }
}

/// One column block of a hashed Gaussian chain. `widths[µ]` is the number of
/// columns this block contributes to the µ-th matrix, µ = 0..=d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashBlock {
    pub seed: u64,
    pub widths: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DrmKind {
    /// Independent Gaussian matrices generated by hashing, as column blocks.
    GaussianHashed { master_seed: u64, blocks: Vec<HashBlock> },
    /// Interface matrices of a random TT. `cores[µ−1]` is the core of mode µ;
    /// a left chain uses modes 1..d−1 and a right chain modes 2..d. Missing
    /// cores make a partial chain.
    Tt { seed: u64, cores: Vec<Option<Core3>> },
}

/// Identifies the matrices a sketch was taken with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    /// 0 for hashed Gaussian, 1 for TT.
    pub kind: u8,
    /// 0 for left, 1 for right.
    pub side: u8,
    pub seed: u64,
    pub digest: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DrmChain {
    side: Side,
    shape: Shape,
    /// Column counts for µ = 0..=d.
    widths: Vec<usize>,
    /// Modes `lo..=hi` for which the chain provides a matrix.
    lo: usize,
    hi: usize,
    kind: DrmKind,
}

impl DrmChain {
    /// Hashed Gaussian chain with ranks `r_1..r_{d−1}`.
    pub fn gaussian(shape: &Shape, ranks: &RankTuple, side: Side, seed: u64) -> Result<Self> {
        let ranks = ranks.clone().for_shape(shape)?;
        let d = shape.order();
        let widths = boundary_widths(d, ranks.as_slice(), side, true);
        let (lo, hi) = full_range(d, side);
        Ok(DrmChain {
            side,
            shape: shape.clone(),
            widths: widths.clone(),
            lo,
            hi,
            kind: DrmKind::GaussianHashed {
                master_seed: seed,
                blocks: vec![HashBlock { seed, widths }],
            },
        })
    }

    /// Random TT chain with entries of variance `1/r^L_µ` (left) or
    /// `1/r^R_{µ−1}` (right).
    pub fn tt(shape: &Shape, ranks: &RankTuple, side: Side, seed: u64) -> Result<Self> {
        let ranks = ranks.clone().for_shape(shape)?;
        let d = shape.order();
        let widths = boundary_widths(d, ranks.as_slice(), side, true);
        let modes: Vec<usize> = match side {
            Side::Left => (1..d).collect(),
            Side::Right => (2..=d).collect(),
        };
        let mut cores = vec![None; d];
        for mu in modes {
            let left = ranks.get(mu - 1);
            let right = ranks.get(mu);
            let n = shape.mode(mu);
            let var_rank = match side {
                Side::Left => right,
                Side::Right => left,
            };
            let sd = (1.0 / var_rank as f64).sqrt();
            let s = mode_seed(seed, mu, side.tag());
            let data = (0..left * n * right)
                .map(|k| sd * hash_to_normal(splitmix64(s.wrapping_add(k as u64))))
                .collect();
            cores[mu - 1] = Some(Core3::new(left, n, right, data)?);
        }
        let (lo, hi) = full_range(d, side);
        Ok(DrmChain {
            side,
            shape: shape.clone(),
            widths,
            lo,
            hi,
            kind: DrmKind::Tt { seed, cores },
        })
    }

    /// Chain from explicit TT cores. For a left chain `cores` are modes 1..k
    /// (k ≤ d−1); for a right chain they are modes d−k+1..d (k ≤ d−1).
    /// With no cores the chain holds only the boundary matrix `[1]`.
    pub fn from_tt_cores(shape: &Shape, side: Side, cores: Vec<Core3>, seed: u64) -> Result<Self> {
        let d = shape.order();
        let k = cores.len();
        if k > d - 1 {
            return Err(Error::InvalidRanks(format!("{k} cores for an order-{d} chain")));
        }
        let first_mode = match side {
            Side::Left => 1,
            Side::Right => d - k + 1,
        };
        let mut slots = vec![None; d];
        for (j, core) in cores.into_iter().enumerate() {
            let mu = first_mode + j;
            if core.n() != shape.mode(mu) {
                return Err(Error::dims("DrmChain::from_tt_cores", format!("core for mode {mu} has size {}", core.n())));
            }
            slots[mu - 1] = Some(core);
        }
        let mut widths = vec![0; d + 1];
        match side {
            Side::Left => {
                widths[0] = 1;
                let mut prev = 1;
                for mu in 1..=k {
                    let c = slots[mu - 1].as_ref().unwrap();
                    if c.left() != prev {
                        return Err(Error::InvalidRanks(format!("core {mu} left rank {} != {prev}", c.left())));
                    }
                    prev = c.right();
                    widths[mu] = prev;
                }
            }
            Side::Right => {
                widths[d] = 1;
                let mut next = 1;
                for mu in (first_mode..=d).rev() {
                    let c = slots[mu - 1].as_ref().unwrap();
                    if c.right() != next {
                        return Err(Error::InvalidRanks(format!("core {mu} right rank {} != {next}", c.right())));
                    }
                    next = c.left();
                    widths[mu - 1] = next;
                }
            }
        }
        let (lo, hi) = match side {
            Side::Left => (0, k),
            Side::Right => (d - k, d),
        };
        Ok(DrmChain {
            side,
            shape: shape.clone(),
            widths,
            lo,
            hi,
            kind: DrmKind::Tt { seed, cores: slots },
        })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn kind(&self) -> &DrmKind {
        &self.kind
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.kind, DrmKind::GaussianHashed { .. })
    }

    pub fn seed(&self) -> u64 {
        match &self.kind {
            DrmKind::GaussianHashed { master_seed, .. } => *master_seed,
            DrmKind::Tt { seed, .. } => *seed,
        }
    }

    /// Column count of the µ-th matrix (µ = 0..=d).
    pub fn rank(&self, mu: usize) -> usize {
        self.widths[mu]
    }

    /// Whether the µ-th matrix is available.
    pub fn has(&self, mu: usize) -> bool {
        (self.lo..=self.hi).contains(&mu)
    }

    /// Inclusive range of available modes.
    pub fn mode_range(&self) -> (usize, usize) {
        (self.lo, self.hi)
    }

    /// Column counts for µ = 0..=d.
    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    /// `r_1..r_{d−1}` of a complete chain.
    pub fn ranks(&self) -> Result<RankTuple> {
        RankTuple::new(self.widths[1..self.shape.order()].to_vec())
    }

    /// Mode sizes addressed by a row of the µ-th matrix.
    pub fn row_dims(&self, mu: usize) -> &[usize] {
        match self.side {
            Side::Left => &self.shape.dims()[..mu],
            Side::Right => &self.shape.dims()[mu..],
        }
    }

    pub fn n_rows(&self, mu: usize) -> usize {
        self.row_dims(mu).iter().product()
    }

    fn check_mode(&self, mu: usize) -> Result<()> {
        if !self.has(mu) {
            return Err(Error::ModeOutOfRange {
                mu,
                max: self.shape.order(),
            });
        }
        Ok(())
    }

    /// TT core of mode µ (1-based), if this is a TT chain that has it.
    pub fn tt_core(&self, mu: usize) -> Option<&Core3> {
        match &self.kind {
            DrmKind::Tt { cores, .. } => cores.get(mu.wrapping_sub(1)).and_then(Option::as_ref),
            DrmKind::GaussianHashed { .. } => None,
        }
    }

    /// Write the row of the µ-th matrix at a 0-based partial multi-index.
    pub fn row_into(&self, mu: usize, index0: &[usize], out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.widths[mu]);
        match &self.kind {
            DrmKind::GaussianHashed { blocks, .. } => {
                let dims = self.row_dims(mu);
                let mut off = 0;
                for b in blocks {
                    let w = b.widths[mu];
                    if w == 0 {
                        continue;
                    }
                    let dst = &mut out[off..off + w];
                    if index0.is_empty() {
                        dst.fill(1.0);
                    } else {
                        hashed_gaussian_row_into(index0, dims, mode_seed(b.seed, mu, self.side.tag()), dst);
                    }
                    off += w;
                }
            }
            DrmKind::Tt { cores, .. } => {
                let v = match self.side {
                    Side::Left => {
                        let mut v = vec![1.0];
                        for (k, &i) in index0.iter().enumerate() {
                            v = vec_times_slice(&v, cores[k].as_ref().unwrap(), i);
                        }
                        v
                    }
                    Side::Right => {
                        let mut v = vec![1.0];
                        for (k, &i) in index0.iter().enumerate().rev() {
                            v = slice_times_vec(cores[mu + k].as_ref().unwrap(), i, &v);
                        }
                        v
                    }
                };
                out.copy_from_slice(&v);
            }
        }
    }

    /// Row of the µ-th matrix at a 1-based partial multi-index.
    pub fn row(&self, mu: usize, indices: &[usize]) -> Result<Vec<f64>> {
        self.check_mode(mu)?;
        let dims = self.row_dims(mu);
        if indices.len() != dims.len() || indices.iter().zip(dims).any(|(&i, &n)| i == 0 || i > n) {
            return Err(Error::IndexOutOfBounds {
                index: indices.to_vec(),
                dims: dims.to_vec(),
            });
        }
        let idx0: Vec<usize> = indices.iter().map(|i| i - 1).collect();
        let mut out = vec![0.0; self.widths[mu]];
        self.row_into(mu, &idx0, &mut out);
        Ok(out)
    }

    /// The full µ-th matrix, rows in row-major multi-index order.
    pub fn matrix(&self, mu: usize, cap: usize) -> Result<Matrix> {
        self.check_mode(mu)?;
        let rows = self.n_rows(mu);
        let cols = self.widths[mu];
        if rows * cols > cap {
            return Err(Error::CapExceeded {
                entries: rows * cols,
                cap,
            });
        }
        if let DrmKind::Tt { cores, .. } = &self.kind {
            let d = self.shape.order();
            let owned: Vec<Core3> = match self.side {
                Side::Left => cores[..mu].iter().map(|c| c.clone().unwrap()).collect(),
                Side::Right => cores[mu..d].iter().map(|c| c.clone().unwrap()).collect(),
            };
            return Ok(match self.side {
                Side::Left => left_interface_of(&owned),
                Side::Right => right_interface_of(&owned),
            });
        }
        let dims = self.row_dims(mu).to_vec();
        let mut m = Matrix::zeros(rows, cols);
        let mut idx = vec![0usize; dims.len()];
        for r in 0..rows {
            self.row_into(mu, &idx, m.row_mut(r));
            for k in (0..dims.len()).rev() {
                idx[k] += 1;
                if idx[k] < dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(m)
    }

    /// Rows selected by a list of full 0-based multi-indices (flattened,
    /// `n × d`), for every available µ. Entry µ of the result is `n × r_µ`;
    /// unavailable modes give an empty matrix.
    pub fn gather(&self, index0: &[usize], n: usize) -> Vec<Matrix> {
        let d = self.shape.order();
        debug_assert_eq!(index0.len(), n * d);
        if let DrmKind::Tt { cores, .. } = &self.kind {
            return match self.side {
                Side::Left => gather_left_tt(cores, index0, n, d),
                Side::Right => gather_right_tt(cores, index0, n, d),
            };
        }
        (0..=d)
            .map(|mu| {
                if !self.has(mu) {
                    return Matrix::zeros(0, 0);
                }
                let mut m = Matrix::zeros(n, self.widths[mu]);
                for j in 0..n {
                    let full = &index0[j * d..(j + 1) * d];
                    let part = match self.side {
                        Side::Left => &full[..mu],
                        Side::Right => &full[mu..],
                    };
                    self.row_into(mu, part, m.row_mut(j));
                }
                m
            })
            .collect()
    }

    /// Append independent columns: matrix µ gains `extra[µ−1]` columns while
    /// its existing columns stay bitwise identical.
    pub fn extend(&self, extra: &[usize]) -> Result<DrmChain> {
        let d = self.shape.order();
        if extra.len() != d - 1 {
            return Err(Error::InvalidRanks(format!("{} extra ranks for an order-{d} chain", extra.len())));
        }
        let DrmKind::GaussianHashed { master_seed, blocks } = &self.kind else {
            return Err(Error::Unsupported(
                "extension of TT dimension-reduction chains".into(),
            ));
        };
        if extra.iter().all(|&e| e == 0) {
            return Ok(self.clone());
        }
        let seed = block_seed(*master_seed, blocks.len());
        let block_widths = boundary_widths(d, extra, self.side, false);
        let mut widths = self.widths.clone();
        widths.iter_mut().zip(&block_widths).for_each(|(w, e)| *w += e);
        let mut blocks = blocks.clone();
        blocks.push(HashBlock {
            seed,
            widths: block_widths,
        });
        Ok(DrmChain {
            side: self.side,
            shape: self.shape.clone(),
            widths,
            lo: self.lo,
            hi: self.hi,
            kind: DrmKind::GaussianHashed {
                master_seed: *master_seed,
                blocks,
            },
        })
    }

    /// Number of column blocks (1 for TT chains).
    pub fn n_blocks(&self) -> usize {
        match &self.kind {
            DrmKind::GaussianHashed { blocks, .. } => blocks.len(),
            DrmKind::Tt { .. } => 1,
        }
    }

    /// The chain made of column blocks `a..b` of a hashed chain.
    pub fn block_range(&self, a: usize, b: usize) -> Option<DrmChain> {
        let DrmKind::GaussianHashed { master_seed, blocks } = &self.kind else {
            return None;
        };
        let blocks = blocks.get(a..b)?.to_vec();
        let mut widths = vec![0; self.widths.len()];
        for blk in &blocks {
            widths.iter_mut().zip(&blk.widths).for_each(|(w, x)| *w += x);
        }
        Some(DrmChain {
            side: self.side,
            shape: self.shape.clone(),
            widths,
            lo: self.lo,
            hi: self.hi,
            kind: DrmKind::GaussianHashed {
                master_seed: *master_seed,
                blocks,
            },
        })
    }

    /// Whether `self` consists of the leading column blocks of `other`.
    pub fn is_prefix_of(&self, other: &DrmChain) -> bool {
        match (&self.kind, &other.kind) {
            (
                DrmKind::GaussianHashed { master_seed: a, blocks: ba },
                DrmKind::GaussianHashed { master_seed: b, blocks: bb },
            ) => {
                self.side == other.side
                    && self.shape == other.shape
                    && a == b
                    && ba.len() <= bb.len()
                    && ba[..] == bb[..ba.len()]
            }
            _ => self == other,
        }
    }

    /// TT chain whose cores are contracted with `U_µ` along the mode index:
    /// `B̃_µ[a, k, b] = Σ_i B_µ[a, i, b] U_µ[i, k]`.
    pub fn project(&self, factors: &[Matrix]) -> Result<DrmChain> {
        let DrmKind::Tt { seed, cores } = &self.kind else {
            return Err(Error::Unsupported("projection of hashed Gaussian chains".into()));
        };
        if factors.len() != self.shape.order() {
            return Err(Error::dims("DrmChain::project", "one factor per mode required"));
        }
        let mut new_cores = Vec::with_capacity(cores.len());
        for (c, u) in cores.iter().zip(factors) {
            new_cores.push(match c {
                Some(c) => {
                    if u.rows() != c.n() {
                        return Err(Error::dims("DrmChain::project", "factor rows differ from mode size"));
                    }
                    Some(c.mode2_product(&u.transpose()))
                }
                None => None,
            });
        }
        let shape = Shape::new(factors.iter().map(Matrix::cols).collect())?;
        Ok(DrmChain {
            side: self.side,
            shape,
            widths: self.widths.clone(),
            lo: self.lo,
            hi: self.hi,
            kind: DrmKind::Tt {
                seed: *seed,
                cores: new_cores,
            },
        })
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let mut h = 0u64;
        let mut mix = |v: u64| h = splitmix64(h ^ v);
        mix(self.side.tag());
        self.shape.dims().iter().for_each(|&n| mix(n as u64));
        self.widths.iter().for_each(|&w| mix(w as u64));
        let kind = match &self.kind {
            DrmKind::GaussianHashed { master_seed, blocks } => {
                mix(*master_seed);
                for b in blocks {
                    mix(b.seed);
                    b.widths.iter().for_each(|&w| mix(w as u64));
                }
                0
            }
            DrmKind::Tt { seed, cores } => {
                mix(*seed);
                for c in cores.iter().flatten() {
                    c.as_slice().iter().for_each(|v| mix(v.to_bits()));
                }
                1
            }
        };
        Fingerprint {
            kind,
            side: self.side.tag() as u8,
            seed: self.seed(),
            digest: h,
        }
    }
}

/// Widths for µ = 0..=d from interior ranks; the boundary matrix of the
/// chain's own side is `[1]` for the first block and absent otherwise.
fn boundary_widths(d: usize, interior: &[usize], side: Side, first: bool) -> Vec<usize> {
    let mut w = vec![0; d + 1];
    w[1..d].copy_from_slice(interior);
    let b = usize::from(first);
    match side {
        Side::Left => w[0] = b,
        Side::Right => w[d] = b,
    }
    w
}

fn full_range(d: usize, side: Side) -> (usize, usize) {
    match side {
        Side::Left => (0, d - 1),
        Side::Right => (1, d),
    }
}

fn block_seed(master: u64, k: usize) -> u64 {
    if k == 0 {
        master
    } else {
        splitmix64(master ^ splitmix64(k as u64))
    }
}

/// `v · C[:, i, :]`.
fn vec_times_slice(v: &[f64], c: &Core3, i: usize) -> Vec<f64> {
    let mut out = vec![0.0; c.right()];
    for (a, &va) in v.iter().enumerate() {
        for (b, o) in out.iter_mut().enumerate() {
            *o += va * c.get(a, i, b);
        }
    }
    out
}

/// `C[:, i, :] · v`.
fn slice_times_vec(c: &Core3, i: usize, v: &[f64]) -> Vec<f64> {
    (0..c.left())
        .map(|a| v.iter().enumerate().map(|(b, &vb)| c.get(a, i, b) * vb).sum())
        .collect()
}

fn gather_left_tt(cores: &[Option<Core3>], index0: &[usize], n: usize, d: usize) -> Vec<Matrix> {
    let mut out = vec![Matrix::filled(n, 1, 1.0)];
    for mu in 1..=d {
        let Some(core) = cores[mu - 1].as_ref() else {
            break;
        };
        out.push(advance_left(&out[mu - 1], core, index0, d, mu - 1));
    }
    out.resize(d + 1, Matrix::zeros(0, 0));
    out
}

fn gather_right_tt(cores: &[Option<Core3>], index0: &[usize], n: usize, d: usize) -> Vec<Matrix> {
    let mut out = vec![Matrix::zeros(0, 0); d + 1];
    out[d] = Matrix::filled(n, 1, 1.0);
    for mu in (0..d).rev() {
        let Some(core) = cores[mu].as_ref() else {
            break;
        };
        out[mu] = advance_right(&out[mu + 1], core, index0, d, mu);
    }
    out
}

/// Row j of the result is `prev[j, :] · C[:, i_j^{(mode)}, :]`, grouped by slice.
pub(crate) fn advance_left(prev: &Matrix, core: &Core3, index0: &[usize], d: usize, mode: usize) -> Matrix {
    let n = prev.rows();
    let mut out = Matrix::zeros(n, core.right());
    for l in 0..core.n() {
        let rows: Vec<usize> = (0..n).filter(|&j| index0[j * d + mode] == l).collect();
        if rows.is_empty() {
            continue;
        }
        let slice = core.slice(l);
        for &j in &rows {
            let src = prev.row(j);
            let dst = out.row_mut(j);
            for (a, &va) in src.iter().enumerate() {
                if va == 0.0 {
                    continue;
                }
                for (b, o) in dst.iter_mut().enumerate() {
                    *o += va * slice[(a, b)];
                }
            }
        }
    }
    out
}

/// Row j of the result is `C[:, i_j^{(mode)}, :] · next[j, :]ᵀ`.
pub(crate) fn advance_right(next: &Matrix, core: &Core3, index0: &[usize], d: usize, mode: usize) -> Matrix {
    let n = next.rows();
    let mut out = Matrix::zeros(n, core.left());
    for l in 0..core.n() {
        let rows: Vec<usize> = (0..n).filter(|&j| index0[j * d + mode] == l).collect();
        if rows.is_empty() {
            continue;
        }
        let slice = core.slice(l);
        for &j in &rows {
            let src = next.row(j);
            let dst = out.row_mut(j);
            for (a, o) in dst.iter_mut().enumerate() {
                *o = slice.row(a).iter().zip(src).map(|(x, y)| x * y).sum();
            }
        }
    }
    out
}
