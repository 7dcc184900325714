use super::{CpTensor, DenseTensor, Shape, SparseTensor, TtTensor, TuckerTensor};
use crate::error::{Error, Result};

/// Default entry budget for dense materialization.
pub const DEFAULT_MATERIALIZATION_CAP: usize = 10_000_000;

/// Any supported tensor representation. Sums are kept flat.
#[derive(Clone, Debug, PartialEq)]
pub enum StructuredTensor {
    Dense(DenseTensor),
    Sparse(SparseTensor),
    Tt(TtTensor),
    Cp(CpTensor),
    Tucker(TuckerTensor),
    Sum(Vec<StructuredTensor>),
}

impl From<DenseTensor> for StructuredTensor {
    fn from(t: DenseTensor) -> Self {
        StructuredTensor::Dense(t)
    }
}

impl From<SparseTensor> for StructuredTensor {
    fn from(t: SparseTensor) -> Self {
        StructuredTensor::Sparse(t)
    }
}

impl From<TtTensor> for StructuredTensor {
    fn from(t: TtTensor) -> Self {
        StructuredTensor::Tt(t)
    }
}

impl From<CpTensor> for StructuredTensor {
    fn from(t: CpTensor) -> Self {
        StructuredTensor::Cp(t)
    }
}

impl From<TuckerTensor> for StructuredTensor {
    fn from(t: TuckerTensor) -> Self {
        StructuredTensor::Tucker(t)
    }
}

impl StructuredTensor {
    /// Lazy sum; nested sums are flattened left to right.
    pub fn sum(members: Vec<StructuredTensor>) -> Result<Self> {
        let mut flat = Vec::with_capacity(members.len());
        for m in members {
            match m {
                StructuredTensor::Sum(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        let Some(first) = flat.first() else {
            return Err(Error::InvalidShape("empty sum".into()));
        };
        let shape = first.shape().clone();
        for m in &flat[1..] {
            shape.check_same(m.shape())?;
        }
        Ok(StructuredTensor::Sum(flat))
    }

    pub fn shape(&self) -> &Shape {
        match self {
            StructuredTensor::Dense(t) => t.shape(),
            StructuredTensor::Sparse(t) => t.shape(),
            StructuredTensor::Tt(t) => t.shape(),
            StructuredTensor::Cp(t) => t.shape(),
            StructuredTensor::Tucker(t) => t.shape(),
            StructuredTensor::Sum(ms) => ms[0].shape(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            StructuredTensor::Dense(_) => "dense",
            StructuredTensor::Sparse(_) => "sparse",
            StructuredTensor::Tt(_) => "tt",
            StructuredTensor::Cp(_) => "cp",
            StructuredTensor::Tucker(_) => "tucker",
            StructuredTensor::Sum(_) => "sum",
        }
    }

    /// Summands in order; a non-sum is its own single summand.
    pub fn summands(&self) -> &[StructuredTensor] {
        match self {
            StructuredTensor::Sum(ms) => ms,
            other => std::slice::from_ref(other),
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        match self {
            StructuredTensor::Dense(t) => t.scale(alpha),
            StructuredTensor::Sparse(t) => t.scale(alpha),
            StructuredTensor::Tt(t) => t.scale(alpha),
            StructuredTensor::Cp(t) => t.scale(alpha),
            StructuredTensor::Tucker(t) => t.scale(alpha),
            StructuredTensor::Sum(ms) => ms.iter_mut().for_each(|m| m.scale(alpha)),
        }
    }

    pub fn to_dense(&self, cap: usize) -> Result<DenseTensor> {
        match self {
            StructuredTensor::Dense(t) => {
                if t.shape().numel() > cap {
                    return Err(Error::CapExceeded {
                        entries: t.shape().numel(),
                        cap,
                    });
                }
                Ok(t.clone())
            }
            StructuredTensor::Sparse(t) => t.to_dense(cap),
            StructuredTensor::Tt(t) => t.to_dense(cap),
            StructuredTensor::Cp(t) => t.to_dense(cap),
            StructuredTensor::Tucker(t) => t.to_dense(cap),
            StructuredTensor::Sum(ms) => {
                let mut acc = ms[0].to_dense(cap)?;
                for m in &ms[1..] {
                    acc.add_assign(&m.to_dense(cap)?)?;
                }
                Ok(acc)
            }
        }
    }

    /// Exact TT form when every summand is TT or CP.
    pub fn as_tt(&self) -> Option<TtTensor> {
        let mut acc: Option<TtTensor> = None;
        for m in self.summands() {
            let tt = match m {
                StructuredTensor::Tt(t) => t.clone(),
                StructuredTensor::Cp(t) => t.to_tt(),
                _ => return None,
            };
            acc = Some(match acc {
                None => tt,
                Some(a) => a.add(&tt).ok()?,
            });
        }
        acc
    }

    /// Frobenius norm, through the TT path when available.
    pub fn norm(&self, cap: usize) -> Result<f64> {
        match self {
            StructuredTensor::Dense(t) => Ok(t.norm()),
            StructuredTensor::Sparse(t) => Ok(t.norm()),
            StructuredTensor::Tt(t) => Ok(t.norm()),
            _ => match self.as_tt() {
                Some(tt) => Ok(tt.norm()),
                None => Ok(self.to_dense(cap)?.norm()),
            },
        }
    }
}

/// Relative errors of an approximation under both normalizations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelErrors {
    /// `‖T − T̃‖ / ‖T‖`.
    pub vs_input: f64,
    /// `‖T − T̃‖ / ‖T̃‖`.
    pub vs_approx: f64,
    pub abs: f64,
}

/// `‖T − T̃‖_F / ‖T‖_F`.
pub fn rel_error(t: &StructuredTensor, approx: &TtTensor) -> Result<f64> {
    Ok(rel_errors(t, approx, DEFAULT_MATERIALIZATION_CAP)?.vs_input)
}

/// Both relative errors. TT and CP inputs (and sums of them) go through an
/// exact TT difference; everything else is materialized under `cap`.
pub fn rel_errors(t: &StructuredTensor, approx: &TtTensor, cap: usize) -> Result<RelErrors> {
    t.shape().check_same(approx.shape())?;
    let approx_norm = approx.norm();
    let (abs, t_norm) = match t.as_tt() {
        Some(tt) => (tt.sub(approx)?.norm(), tt.norm()),
        None => {
            let dense = t.to_dense(cap)?;
            let diff = dense.sub(&approx.to_dense(cap)?)?;
            (diff.norm(), dense.norm())
        }
    };
    Ok(RelErrors {
        vs_input: ratio(abs, t_norm),
        vs_approx: ratio(abs, approx_norm),
        abs,
    })
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}
