//! Simulation and diagnostics for the fluctuation field of the weakly
//! asymmetric simple exclusion process on a ring.
//!
//! Modules follow the pipeline: [`exclusion`] runs the particle system,
//! [`field`] pairs it with test functions and tracks the martingale
//! decomposition, [`basis`] supplies Hermite and Dirichlet bases and
//! negative Sobolev norms, [`gaussian`] samples the limiting Gaussian objects,
//! and [`harness`] drives replicated experiments.

pub mod basis;
pub mod error;
pub mod exclusion;
pub mod field;
pub mod gaussian;
pub mod harness;
pub mod quadrature;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
