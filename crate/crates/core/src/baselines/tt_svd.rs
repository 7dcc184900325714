//! Deterministic TT approximation by sequential truncated SVDs.

use crate::error::{Error, Result};
use crate::linalg::{svd, Matrix, SvdResult};
use crate::tensor::{Core3, DenseTensor, RankTuple, StructuredTensor, TtTensor};

/// How many singular triplets to keep at mode µ.
#[derive(Clone, Copy)]
enum Truncation<'a> {
    Ranks(&'a RankTuple),
    /// Drop the tail while its squared norm stays below `delta²`.
    Tolerance(f64),
}

impl Truncation<'_> {
    fn keep(&self, mu: usize, s: &SvdResult) -> usize {
        let available = s.singular_values.len();
        match self {
            Truncation::Ranks(r) => r.get(mu).min(available),
            Truncation::Tolerance(delta) => {
                let mut tail = 0.0;
                let mut k = available;
                while k > 1 {
                    let next = tail + s.singular_values[k - 1].powi(2);
                    if next > delta * delta {
                        break;
                    }
                    tail = next;
                    k -= 1;
                }
                k.max(1)
            }
        }
    }
}

fn check_ranks(ranks: &RankTuple, d: usize) -> Result<()> {
    if ranks.len() + 1 != d {
        return Err(Error::InvalidRanks(format!("{} ranks for an order-{d} tensor", ranks.len())));
    }
    Ok(())
}

fn sweep_dense(t: &DenseTensor, rule: Truncation) -> Result<TtTensor> {
    let dims = t.shape().dims();
    let d = dims.len();
    let mut rem = Matrix::from_vec(1, t.shape().numel(), t.values().to_vec())?;
    let mut cores = Vec::with_capacity(d);
    for mu in 1..d {
        let n = dims[mu - 1];
        let rows = rem.rows() * n;
        let cols = rem.cols() / n;
        let unf = rem.reshape(rows, cols)?;
        let mut s = svd(&unf)?;
        let k = rule.keep(mu, &s);
        s.truncate(k);
        let mut sv = s.vt;
        for (i, &sigma) in s.singular_values.iter().enumerate() {
            sv.row_mut(i).iter_mut().for_each(|v| *v *= sigma);
        }
        cores.push(Core3::from_left_unfolding(s.u, n)?);
        rem = sv;
    }
    let n = dims[d - 1];
    let rows = rem.rows();
    cores.push(Core3::new(rows, n, 1, rem.into_vec())?);
    TtTensor::new(cores)
}

/// TT-SVD of a dense tensor truncated to `ranks` (clipped to what each unfolding has).
pub fn tt_svd_dense(t: &DenseTensor, ranks: &RankTuple) -> Result<TtTensor> {
    check_ranks(ranks, t.shape().order())?;
    sweep_dense(t, Truncation::Ranks(ranks))
}

/// TT-SVD with relative accuracy `eps`: the error is at most `eps·‖T‖_F`.
pub fn tt_svd_tol(t: &DenseTensor, eps: f64) -> Result<TtTensor> {
    let d = t.shape().order();
    let delta = eps * t.norm() / ((d.max(2) - 1) as f64).sqrt();
    sweep_dense(t, Truncation::Tolerance(delta))
}

fn sweep_tt(t: &TtTensor, rule: Truncation) -> Result<TtTensor> {
    let d = t.order();
    let mut x = t.clone();
    x.right_orthogonalize();
    let mut cores = x.into_cores();
    for mu in 1..d {
        let c = &cores[mu - 1];
        let n = c.n();
        let mut s = svd(&c.left_unfolding())?;
        let k = rule.keep(mu, &s);
        s.truncate(k);
        let mut sv = s.vt;
        for (i, &sigma) in s.singular_values.iter().enumerate() {
            sv.row_mut(i).iter_mut().for_each(|v| *v *= sigma);
        }
        cores[mu - 1] = Core3::from_left_unfolding(s.u, n)?;
        let next = &cores[mu];
        let nn = next.n();
        cores[mu] = Core3::from_right_unfolding(sv.matmul(&next.right_unfolding()), nn)?;
    }
    TtTensor::new(cores)
}

/// TT rounding: right-orthogonalize, then truncate left to right.
pub fn tt_round(t: &TtTensor, ranks: &RankTuple) -> Result<TtTensor> {
    check_ranks(ranks, t.order())?;
    sweep_tt(t, Truncation::Ranks(ranks))
}

/// TT rounding to relative accuracy `eps`.
pub fn tt_round_tol(t: &TtTensor, eps: f64) -> Result<TtTensor> {
    let d = t.order();
    let delta = eps * t.norm() / ((d.max(2) - 1) as f64).sqrt();
    sweep_tt(t, Truncation::Tolerance(delta))
}

/// TT-SVD of any representation: TT-expressible inputs are rounded, the
/// rest are materialized under `cap`.
pub fn tt_svd(t: &StructuredTensor, ranks: &RankTuple, cap: usize) -> Result<TtTensor> {
    match t {
        StructuredTensor::Dense(x) => tt_svd_dense(x, ranks),
        other => match other.as_tt() {
            Some(tt) => tt_round(&tt, ranks),
            None => tt_svd_dense(&other.to_dense(cap)?, ranks),
        },
    }
}
