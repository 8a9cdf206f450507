//! Unit conventions and conversions.
//!
//! Angular frequency is rad/fs everywhere. Crystal lengths are mm, GVD and air
//! paths are cm, wavelengths are nm at interfaces and um inside Sellmeier
//! formulas. Wavevectors are rad/mm.

use std::f64::consts::PI;

/// Speed of light in nm/fs.
pub const C_NM_PER_FS: f64 = 299.792_458;
/// Speed of light in mm/fs.
pub const C_MM_PER_FS: f64 = 2.997_924_58e-4;

/// Wavelength (nm) to angular frequency (rad/fs).
pub fn omega_from_nm(lambda_nm: f64) -> f64 {
    2.0 * PI * C_NM_PER_FS / lambda_nm
}

/// Angular frequency (rad/fs) to wavelength (nm).
pub fn nm_from_omega(omega: f64) -> f64 {
    2.0 * PI * C_NM_PER_FS / omega
}

pub fn cm_to_mm(cm: f64) -> f64 {
    cm * 10.0
}

pub fn mm_to_um(mm: f64) -> f64 {
    mm * 1e3
}
