//! Material dispersion, phase matching and the interferometer phase.

mod crystal;
mod interferometer;
mod material;

pub use crystal::{crystal_mismatch, TypeICrystal};
pub use interferometer::{
    find_pump_path, interferometer_phase, phase_slope, Extremum, Geometry, InterferometerMedia,
    PumpPathOptions,
};
pub use material::{
    group_velocity, group_velocity_with_step, gvd, inverse_group_velocity, refractive_index,
    wavevector, Formula, Material, MaterialTable, DEFAULT_REL_STEP, GVD_REL_STEP,
};
