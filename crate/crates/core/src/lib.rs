//! Center manifolds of random dynamical systems around random stationary
//! points.
//!
//! The pipeline: a [`driver::DrivingSystem`] supplies the noise, a
//! [`cocycle::Cocycle`] with a [`cocycle::StationaryPoint`] is linearized,
//! [`met`] computes the Lyapunov spectrum and the U/C/S splitting, [`lp`]
//! solves the Lyapunov–Perron fixed point for each center vector, and
//! [`manifold`] turns those solutions into a checked chart.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

extern crate alloc;

pub mod cocycle;
pub mod driver;
mod error;
pub mod field;
mod linalg;
pub mod lp;
pub mod manifold;
mod math;
pub mod met;
pub mod systems;

pub use error::{Error, Result};
