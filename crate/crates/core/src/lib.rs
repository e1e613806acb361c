//! Monte-Carlo statevector simulation of syndrome extraction on the
//! `[[9,1,3]]` Bacon-Shor subsystem code under a trapped-ion noise model.
//!
//! The numerical core is generic over the scalar type ([`scalar::Real`],
//! implemented for `f32` and `f64`); the aliases below fix the common
//! choices.

pub mod circuit;
pub mod code;
pub mod decode;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod noise;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result};

/// Crate version, recorded in every result table.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type StateVector64 = engine::StateVector<f64>;
pub type StateVector32 = engine::StateVector<f32>;
pub type FactoredState64 = engine::FactoredState<f64>;
pub type FactoredState32 = engine::FactoredState<f32>;
