//! Diagnostics for causally well-specified additive and location-scale noise
//! models.

pub mod cli;
pub mod error;
pub mod indtest;
pub mod rankdep;
pub mod regress;
pub mod scmlab;
pub mod tabular;
pub mod wellspec;

pub use error::{Error, Result};
