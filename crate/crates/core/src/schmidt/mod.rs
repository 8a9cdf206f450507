//! Schmidt decomposition of the TPA and gain-dependent mode weights.

mod decompose;
mod export;
mod gain;
mod pairs;

pub use decompose::{decompose, inner, DecomposeOptions, SchmidtDecomposition, Truncation};
pub use export::write_modes;
pub use gain::{redistribute, redistribute_with, schmidt_number, GainReference, GainState};
pub use pairs::{half_axis_weights, pair_superpositions, reflection_defect, PAIR_TOLERANCE};
