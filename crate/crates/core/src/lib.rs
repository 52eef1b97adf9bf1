//! Competitive reaction-diffusion models on a two-region habitat.
//!
//! Two or three species diffuse on a line whose carrying capacities jump at
//! `x = 0` between a forest side (`F`) and an urban side (`U`). The crate
//! provides the pointwise reactions, homogeneous equilibria, invasion
//! coefficients and critical bubbles, the pinned stationary front of the
//! strong-competition limit, a semi-implicit solver, and packaged scenarios.
//!
//! The crate is `no_std` with `alloc`; the `std` feature only adds
//! `std::error::Error` for [`Error`].

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod math;

pub mod equilibria;
pub mod experiments;
pub mod invasion;
pub mod model;
pub mod pde;
pub mod stationary;

pub use error::{Error, Result};
pub use model::{ModelParams, PiecewiseCapacity, Side, SpeciesPair};
