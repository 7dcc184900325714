pub mod baselines;
pub mod bench;
pub mod error;
pub mod drm;
pub mod linalg;
pub mod sketch;
pub mod tensor;

pub use error::{Error, Result};
