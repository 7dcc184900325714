//! Thin SVD: Householder QR preconditioning followed by one-sided Jacobi.

use super::qr::qr_economy;
use super::Matrix;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_SWEEPS: usize = 80;

/// Thin SVD `a = u · diag(singular_values) · vt`, k = min(m, n).
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: Matrix,
    pub singular_values: Vec<f64>,
    pub vt: Matrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for (j, s) in self.singular_values.iter().enumerate() {
                us[(i, j)] *= s;
            }
        }
        us.matmul(&self.vt)
    }

    /// Keep the leading `k` triplets.
    pub fn truncate(&mut self, k: usize) {
        let k = k.min(self.singular_values.len());
        self.u = self.u.columns(0, k);
        self.singular_values.truncate(k);
        self.vt = self.vt.row_range(0, k);
    }
}

pub fn svd(a: &Matrix) -> Result<SvdResult> {
    svd_with_sweeps(a, DEFAULT_MAX_SWEEPS)
}

pub fn svd_with_sweeps(a: &Matrix, max_sweeps: usize) -> Result<SvdResult> {
    let (m, n) = a.shape();
    if m < n {
        let t = svd_with_sweeps(&a.transpose(), max_sweeps)?;
        return Ok(SvdResult {
            u: t.vt.transpose(),
            singular_values: t.singular_values,
            vt: t.u.transpose(),
        });
    }
    if n == 0 {
        return Ok(SvdResult {
            u: Matrix::zeros(m, 0),
            singular_values: Vec::new(),
            vt: Matrix::zeros(0, 0),
        });
    }

    let (q, r) = qr_economy(a);
    // Rows of `w` are the columns of R; rows of `v` are the columns of V.
    let mut w = r.transpose();
    let mut v = Matrix::identity(n);
    jacobi_sweeps(&mut w, &mut v, max_sweeps)?;

    let norms: Vec<f64> = (0..n)
        .map(|j| w.row(j).iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let negligible = roundoff_floor(&w);
    let mut ur = Matrix::zeros(n, n);
    let mut vt = Matrix::zeros(n, n);
    let mut singular_values = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        if s > negligible && s > 0.0 {
            for i in 0..n {
                ur[(i, dst)] = w[(src, i)] / s;
            }
            singular_values.push(s);
        } else {
            missing.push(dst);
            singular_values.push(0.0);
        }
        vt.row_mut(dst).copy_from_slice(v.row(src));
    }
    complete_orthonormal_columns(&mut ur, &missing);
    Ok(SvdResult {
        u: q.matmul(&ur),
        singular_values,
        vt,
    })
}

/// Column norm below which a column is rounding noise: ε‖W‖_F.
fn roundoff_floor(w: &Matrix) -> f64 {
    f64::EPSILON * w.frobenius_norm()
}

fn jacobi_sweeps(w: &mut Matrix, v: &mut Matrix, max_sweeps: usize) -> Result<()> {
    let n = w.rows();
    let tol = 4.0 * f64::EPSILON;
    // Noise columns never orthogonalize to relative precision; leave them alone.
    let floor = roundoff_floor(w).powi(2);
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let wp = w.row(p);
                    let wq = w.row(q);
                    let mut a = 0.0;
                    let mut b = 0.0;
                    let mut g = 0.0;
                    for (x, y) in wp.iter().zip(wq) {
                        a += x * x;
                        b += y * y;
                        g += x * y;
                    }
                    (a, b, g)
                };
                if alpha <= floor || beta <= floor || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_rows(w, p, q, c, s);
                rotate_rows(v, p, q, c, s);
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(Error::SvdNoConvergence { sweeps: max_sweeps })
}

fn rotate_rows(m: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let cols = m.cols();
    let data = m.as_mut_slice();
    let (head, tail) = data.split_at_mut(q * cols);
    let rp = &mut head[p * cols..(p + 1) * cols];
    let rq = &mut tail[..cols];
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let a = *x;
        let b = *y;
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Fill the listed columns with unit vectors orthogonal to all other columns.
fn complete_orthonormal_columns(u: &mut Matrix, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let n = u.rows();
    let mut filled: Vec<bool> = vec![true; u.cols()];
    for &j in missing {
        filled[j] = false;
    }
    for &j in missing {
        let mut best: Option<Vec<f64>> = None;
        let mut best_norm = 0.0;
        for e in 0..n {
            let mut cand = vec![0.0; n];
            cand[e] = 1.0;
            for _ in 0..2 {
                for (k, ok) in filled.iter().enumerate() {
                    if !ok {
                        continue;
                    }
                    let dot: f64 = (0..n).map(|i| u[(i, k)] * cand[i]).sum();
                    for (i, c) in cand.iter_mut().enumerate() {
                        *c -= dot * u[(i, k)];
                    }
                }
            }
            let norm = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > best_norm {
                best_norm = norm;
                best = Some(cand);
            }
            if best_norm > 0.7 {
                break;
            }
        }
        if let Some(cand) = best {
            for i in 0..n {
                u[(i, j)] = cand[i] / best_norm;
            }
        }
        filled[j] = true;
    }
}
