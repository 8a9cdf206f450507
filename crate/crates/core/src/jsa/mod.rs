//! Two-photon amplitude on a frequency grid.

mod dump;
mod grid;
mod tpa;

pub use dump::{read_tpa, write_tpa};
pub use grid::{FrequencyGrid, PumpConfig};
pub use tpa::{
    build_interferometer_tpa, build_single_crystal_tpa, phase_lock, InterferometerSetup,
    JointSpectralAmplitude, Modulation, Normalization, TpaModel,
};
