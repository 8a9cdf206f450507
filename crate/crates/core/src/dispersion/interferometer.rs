use serde::{Deserialize, Serialize};

use crate::dispersion::crystal::{crystal_mismatch, TypeICrystal};
use crate::dispersion::material::{wavevector, Material, DEFAULT_REL_STEP};
use crate::error::{Error, Result};
use crate::units::cm_to_mm;

/// Interferometer lengths. Crystal length in mm, the rest in cm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub crystal_length_mm: f64,
    pub gvd_length_cm: f64,
    pub air_gap_cm: f64,
    pub pump_path_cm: f64,
}

impl Geometry {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("crystal_length_mm", self.crystal_length_mm),
            ("gvd_length_cm", self.gvd_length_cm),
            ("air_gap_cm", self.air_gap_cm),
            ("pump_path_cm", self.pump_path_cm),
        ];
        for (name, v) in fields {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Precondition(format!("{name} = {v} must be >= 0")));
            }
        }
        Ok(())
    }
}

/// Media between the two crystals.
#[derive(Debug, Clone)]
pub struct InterferometerMedia {
    pub gvd: Material,
    pub air: Material,
}

/// phi(ws, wi) = (Dk_a d_a + k_p^a d0 - k_s^g d - k_i^g d) / 2, in rad.
pub fn interferometer_phase(
    omega_s: f64,
    omega_i: f64,
    geometry: &Geometry,
    media: &InterferometerMedia,
) -> Result<f64> {
    let sum = omega_s + omega_i;
    let d = cm_to_mm(geometry.gvd_length_cm);
    let da = cm_to_mm(geometry.air_gap_cm);
    let d0 = cm_to_mm(geometry.pump_path_cm);
    let kpa = wavevector(&media.air, sum)?;
    let mut phi = kpa * d0;
    if da != 0.0 {
        let dka = kpa - wavevector(&media.air, omega_s)? - wavevector(&media.air, omega_i)?;
        phi += dka * da;
    }
    if d != 0.0 {
        phi -= (wavevector(&media.gvd, omega_s)? + wavevector(&media.gvd, omega_i)?) * d;
    }
    Ok(phi / 2.0)
}

/// Which phase is made stationary in omega_s by the pump-path solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extremum {
    /// The interferometer phase phi alone.
    #[default]
    Phase,
    /// phi plus the crystal term Delta k L / 2 (full cosine argument).
    Total,
}

#[derive(Debug, Clone, Copy)]
pub struct PumpPathOptions {
    pub extremum: Extremum,
    /// Relative finite-difference step for d/d omega_s.
    pub rel_step: f64,
    /// Largest pump path searched, cm.
    pub max_cm: f64,
}

impl Default for PumpPathOptions {
    fn default() -> Self {
        Self {
            extremum: Extremum::Phase,
            rel_step: DEFAULT_REL_STEP,
            max_cm: 1e5,
        }
    }
}

/// Derivative of the selected phase along omega_s at (omega_s, omega_p - target).
pub fn phase_slope(
    omega_s: f64,
    omega_i: f64,
    geometry: &Geometry,
    media: &InterferometerMedia,
    crystal: &TypeICrystal,
    opts: &PumpPathOptions,
) -> Result<f64> {
    let f = |ws: f64| -> Result<f64> {
        let mut p = interferometer_phase(ws, omega_i, geometry, media)?;
        if opts.extremum == Extremum::Total {
            p += crystal_mismatch(ws, omega_i, crystal)? * crystal.length_mm / 2.0;
        }
        Ok(p)
    };
    let h = opts.rel_step * omega_s;
    Ok((f(omega_s + h)? - f(omega_s - h)?) / (2.0 * h))
}

/// Pump path d0 (cm) that makes the phase stationary along omega_s at
/// (target, omega_p - target). The input pump path is ignored.
pub fn find_pump_path(
    target_omega: f64,
    pump_omega: f64,
    geometry: &Geometry,
    media: &InterferometerMedia,
    crystal: &TypeICrystal,
    opts: &PumpPathOptions,
) -> Result<f64> {
    let omega_i = pump_omega - target_omega;
    if !(omega_i > 0.0 && target_omega > 0.0) {
        return Err(Error::Precondition(format!(
            "target {target_omega} rad/fs must lie inside (0, omega_p)"
        )));
    }
    let g = |d0: f64| -> Result<f64> {
        let geo = Geometry {
            pump_path_cm: d0,
            ..*geometry
        };
        phase_slope(target_omega, omega_i, &geo, media, crystal, opts)
    };
    let mut lo = 0.0;
    let mut g_lo = g(lo)?;
    if g_lo == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    let mut g_hi = g(hi)?;
    while g_hi.signum() == g_lo.signum() {
        if hi >= opts.max_cm {
            return Err(Error::NoRootInBracket {
                lower_cm: 0.0,
                upper_cm: hi,
            });
        }
        lo = hi;
        g_lo = g_hi;
        hi = (hi * 2.0).min(opts.max_cm);
        g_hi = g(hi)?;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == g_lo.signum() {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
