//! Two competing SIS viruses in a population whose members choose whether
//! to socially distance by imitation (replicator dynamics).
//!
//! The crate integrates the five-dimensional system, enumerates its
//! equilibria in closed form, classifies their stability both from
//! parameter inequalities and from Jacobian spectra, and reproduces a
//! registry of reference scenarios.

pub mod equilibria;
pub mod error;
pub mod integrator;
pub mod model;
pub mod scenarios;
pub mod stability;

pub use scenarios::registry;

pub use error::{Error, Result};
pub use model::{Params, State, Variant, Virus};
