//! Householder QR in economy form.

use super::Matrix;

/// Economy QR: `a = q·r` with `q` of size m×k having orthonormal columns and
/// `r` of size k×n upper trapezoidal, k = min(m, n). Rank deficiency is allowed.
pub fn qr_economy(a: &Matrix) -> (Matrix, Matrix) {
    let (m, n) = a.shape();
    let k = m.min(n);
    // Columns of `a` are the rows of `work`, so every reflector touches contiguous memory.
    let mut work = a.transpose();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(k);

    for j in 0..k {
        let col = &work.row(j)[j..];
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut v = col.to_vec();
        if norm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let alpha = if v[0] >= 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        v.iter_mut().for_each(|x| *x /= vnorm);
        for c in j..n {
            let row = &mut work.row_mut(c)[j..];
            let dot: f64 = row.iter().zip(&v).map(|(a, b)| a * b).sum();
            row.iter_mut().zip(&v).for_each(|(a, b)| *a -= 2.0 * dot * b);
        }
        reflectors.push(v);
    }

    let mut r = Matrix::zeros(k, n);
    for i in 0..k {
        for c in i..n {
            r[(i, c)] = work[(c, i)];
        }
    }

    // Qᵀ accumulated row-wise: row c of `qt` is column c of Q.
    let mut qt = Matrix::zeros(k, m);
    for c in 0..k {
        qt[(c, c)] = 1.0;
    }
    for j in (0..k).rev() {
        let v = &reflectors[j];
        if v.is_empty() {
            continue;
        }
        for c in 0..k {
            let row = &mut qt.row_mut(c)[j..];
            let dot: f64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
            if dot != 0.0 {
                row.iter_mut().zip(v).for_each(|(a, b)| *a -= 2.0 * dot * b);
            }
        }
    }
    (qt.transpose(), r)
}

/// Orthonormal basis of the column span (the Q factor).
pub fn orth(a: &Matrix) -> Matrix {
    qr_economy(a).0
}
