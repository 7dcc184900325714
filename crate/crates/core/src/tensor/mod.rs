//! Tensor representations, unfoldings, conversions and norms.
//!
//! Multi-indices are 1-based at the public boundary and 0-based inside.
//! Linearization is row-major with the first index varying slowest, so the
//! unfolding `T^{≤µ}` of a dense buffer is a plain reshape.

mod cp;
mod dense;
pub mod io;
mod shape;
mod sparse;
mod structured;
mod tt;
mod tucker;

pub use cp::CpTensor;
pub use dense::DenseTensor;
pub use shape::{linearize, RankTuple, Shape};
pub use sparse::SparseTensor;
pub use structured::{rel_error, rel_errors, RelErrors, StructuredTensor, DEFAULT_MATERIALIZATION_CAP};
pub use tt::{tt_inner, Core3, TtTensor};
pub(crate) use tt::{left_interface_of, right_interface_of};
pub use tucker::TuckerTensor;
