//! Counter-based Gaussian generation from a 64-bit integer hash.

use super::normal::normal_inverse_cdf;
use crate::error::{Error, Result};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 finalizer applied to `x + golden ratio`.
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const LOW_EXPONENT_BITS: u64 = 1 << 61;
const MANTISSA_MASK: u64 = (1 << 52) - 1;
const HALF_EXPONENT: u64 = 1022 << 52;
const UNIT_EPS: f64 = f64::EPSILON;

/// Uniform value in [0, 1) from the mantissa of `h`.
///
/// The leading three bits are forced to `001` so the bit pattern is a finite
/// float with a nonzero exponent; its mantissa read as a number in [0.5, 1)
/// is then mapped to `2x − 1`.
#[inline]
pub fn mantissa_uniform(h: u64) -> f64 {
    let h = (h & (u64::MAX >> 3)) | LOW_EXPONENT_BITS;
    let x = f64::from_bits((h & MANTISSA_MASK) | HALF_EXPONENT);
    2.0 * x - 1.0
}

/// Standard normal value from a hash output.
#[inline]
pub fn hash_to_normal(h: u64) -> f64 {
    let u = mantissa_uniform(h).clamp(UNIT_EPS, 1.0 - UNIT_EPS);
    normal_inverse_cdf(u)
}

/// Linear index of a 0-based multi-index, using the loop `m ← n_j (m + i_j)`
/// over 1-based indices with wrapping arithmetic.
#[inline]
pub fn hash_linear_index(index0: &[usize], dims: &[usize]) -> u64 {
    index0.iter().zip(dims).fold(0u64, |m, (&i, &n)| {
        (n as u64).wrapping_mul(m.wrapping_add(i as u64 + 1))
    })
}

/// Fill `out` with one row of a hashed Gaussian DRM (0-based indices, unchecked).
#[inline]
pub fn hashed_gaussian_row_into(index0: &[usize], dims: &[usize], seed: u64, out: &mut [f64]) {
    let r = out.len() as u64;
    let m = hash_linear_index(index0, dims)
        .wrapping_mul(r)
        .wrapping_add(splitmix64(seed));
    for (j, x) in out.iter_mut().enumerate() {
        *x = hash_to_normal(splitmix64(m.wrapping_add(j as u64 + 1)));
    }
}

/// One row of `r` i.i.d. standard normals addressed by a 1-based multi-index.
pub fn hashed_gaussian_row(indices: &[usize], dims: &[usize], r: usize, seed: u64) -> Result<Vec<f64>> {
    if indices.len() != dims.len() || indices.iter().zip(dims).any(|(&i, &n)| i == 0 || i > n) {
        return Err(Error::IndexOutOfBounds {
            index: indices.to_vec(),
            dims: dims.to_vec(),
        });
    }
    let idx0: Vec<usize> = indices.iter().map(|i| i - 1).collect();
    let mut out = vec![0.0; r];
    hashed_gaussian_row_into(&idx0, dims, seed, &mut out);
    Ok(out)
}

/// Seed for one mode of one side of a chain: `splitmix64(master ^ (2µ + side))`.
#[inline]
pub fn mode_seed(master: u64, mu: usize, side_tag: u64) -> u64 {
    splitmix64(master ^ ((mu as u64).wrapping_mul(2).wrapping_add(side_tag)))
}
