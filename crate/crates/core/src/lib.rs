//! Frequency Schmidt-mode model of bright squeezed vacuum from a single
//! type-I crystal or an SU(1,1) interferometer with a dispersive medium.
//!
//! Pipeline: [`dispersion`] -> [`jsa`] -> [`schmidt`] -> [`observables`],
//! driven by [`scenario`].

pub mod dispersion;
pub mod error;
pub mod jsa;
pub mod observables;
pub mod scenario;
pub mod schmidt;
pub mod units;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
