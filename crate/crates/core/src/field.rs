//! Finite-dimensional fibers E_ω: dimension, norm and per-orbit schedule.

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DVector;

use crate::driver::Realization;
use crate::error::{invalid, Result};
use crate::math;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Norm {
    Euclidean,
    /// (Σ wᵢ|xᵢ|^p)^{1/p} with p ≥ 1 and strictly positive weights.
    WeightedP { p: f64, weights: Vec<f64> },
    Sup,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FiberSpec {
    dim: usize,
    norm: Norm,
    labels: Option<Vec<String>>,
}

impl FiberSpec {
    pub fn new(dim: usize, norm: Norm, labels: Option<Vec<String>>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("fiber dimension must be >= 1"));
        }
        if let Norm::WeightedP { p, weights } = &norm {
            if !(*p >= 1.0) || !p.is_finite() {
                return Err(invalid("weighted p-norm needs finite p >= 1"));
            }
            if weights.len() != dim {
                return Err(invalid("weight vector length must equal the fiber dimension"));
            }
            if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
                return Err(invalid("norm weights must be strictly positive"));
            }
        }
        if let Some(l) = &labels {
            if l.len() != dim {
                return Err(invalid("basis label count must equal the fiber dimension"));
            }
        }
        Ok(FiberSpec { dim, norm, labels })
    }

    pub fn euclidean(dim: usize) -> Self {
        FiberSpec { dim: dim.max(1), norm: Norm::Euclidean, labels: None }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_kind(&self) -> &Norm {
        &self.norm
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn is_euclidean(&self) -> bool {
        self.norm == Norm::Euclidean
    }

    /// Norm of raw coordinates, checking the dimension.
    pub fn norm(&self, x: &DVector<f64>) -> Result<f64> {
        if x.len() != self.dim {
            return Err(invalid(alloc::format!(
                "vector of length {} in fiber of dimension {}",
                x.len(),
                self.dim
            )));
        }
        Ok(match &self.norm {
            Norm::Euclidean => x.norm(),
            Norm::Sup => x.iter().fold(0.0, |m, v| m.max(math::abs(*v))),
            Norm::WeightedP { p, weights } => {
                let s: f64 = x
                    .iter()
                    .zip(weights)
                    .map(|(v, w)| w * math::powf(math::abs(*v), *p))
                    .sum();
                math::powf(s, 1.0 / p)
            }
        })
    }
}

/// Coordinates of a vector in the fiber over θⁿω, tagged with `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberVector {
    pub coords: DVector<f64>,
    pub tag: i64,
}

impl FiberVector {
    pub fn new(coords: DVector<f64>, tag: i64) -> Self {
        FiberVector { coords, tag }
    }

    pub fn from_slice(xs: &[f64], tag: i64) -> Self {
        FiberVector { coords: DVector::from_column_slice(xs), tag }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

pub fn fiber_norm(spec: &FiberSpec, v: &FiberVector) -> Result<f64> {
    spec.norm(&v.coords)
}

/// Which fiber sits over each point of the driving orbit.
#[derive(Clone, Debug, PartialEq)]
pub enum FiberSchedule {
    Constant(FiberSpec),
    /// Choose between two fibers by the sign of symbol component
    /// `component` at index 0.
    BySymbolSign { component: usize, nonneg: FiberSpec, negative: FiberSpec },
}

impl FiberSchedule {
    pub fn fiber_at(&self, omega: &Realization) -> &FiberSpec {
        match self {
            FiberSchedule::Constant(f) => f,
            FiberSchedule::BySymbolSign { component, nonneg, negative } => {
                if omega.component(0, *component) >= 0.0 {
                    nonneg
                } else {
                    negative
                }
            }
        }
    }
}
