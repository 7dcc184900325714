//! Dense matrix kernels: economy QR, thin SVD, and pseudoinverse solves.

mod lstsq;
mod matrix;
mod qr;
mod svd;

pub use lstsq::{lstsq_pinv, pinv, right_lstsq_pinv, DEFAULT_RTOL};
pub use matrix::{gemm, Matrix};
pub use qr::{orth, qr_economy};
pub use svd::{svd, svd_with_sweeps, SvdResult, DEFAULT_MAX_SWEEPS};
