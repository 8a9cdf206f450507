use crate::dispersion::material::{wavevector, Material};
use crate::error::{Error, Result};
use crate::units::{nm_from_omega, C_MM_PER_FS};

/// Collinear type-I crystal: pump extraordinary, signal and idler ordinary.
#[derive(Debug, Clone)]
pub struct TypeICrystal {
    pub ordinary: Material,
    pub extraordinary: Material,
    pub length_mm: f64,
    /// Angle between optic axis and propagation direction, rad.
    pub theta: f64,
}

impl TypeICrystal {
    /// Solve the angle that phase-matches degenerate down-conversion of
    /// `pump_omega` (rad/fs).
    pub fn phase_matched(
        ordinary: Material,
        extraordinary: Material,
        length_mm: f64,
        pump_omega: f64,
    ) -> Result<Self> {
        if !(length_mm >= 0.0) {
            return Err(Error::Precondition(format!(
                "crystal length {length_mm} mm must be >= 0"
            )));
        }
        let lp = nm_from_omega(pump_omega) * 1e-3;
        let no_p = ordinary.index_um(lp)?;
        let ne_p = extraordinary.index_um(lp)?;
        let no_s = ordinary.index_um(2.0 * lp)?;
        let num = no_p.powi(-2) - no_s.powi(-2);
        let den = no_p.powi(-2) - ne_p.powi(-2);
        let s2 = num / den;
        if !(0.0..=1.0).contains(&s2) || !s2.is_finite() {
            return Err(Error::PhaseMatching(format!(
                "no type-I angle for pump at {:.3} nm (sin^2 theta = {s2})",
                lp * 1e3
            )));
        }
        Ok(Self {
            ordinary,
            extraordinary,
            length_mm,
            theta: s2.sqrt().asin(),
        })
    }

    /// Pump (extraordinary wave) index at the fixed crystal angle.
    pub fn pump_index(&self, omega: f64) -> Result<f64> {
        let l = nm_from_omega(omega) * 1e-3;
        let no = self.ordinary.index_um(l)?;
        let ne = self.extraordinary.index_um(l)?;
        let (s, c) = self.theta.sin_cos();
        Ok((c * c / (no * no) + s * s / (ne * ne)).sqrt().recip())
    }

    /// Pump wavevector, rad/mm.
    pub fn pump_k(&self, omega: f64) -> Result<f64> {
        Ok(self.pump_index(omega)? * omega / C_MM_PER_FS)
    }

    /// Signal/idler wavevector, rad/mm.
    pub fn down_k(&self, omega: f64) -> Result<f64> {
        wavevector(&self.ordinary, omega)
    }
}

/// Delta k = k_p(ws + wi) - k_o(ws) - k_o(wi), rad/mm.
pub fn crystal_mismatch(omega_s: f64, omega_i: f64, crystal: &TypeICrystal) -> Result<f64> {
    Ok(crystal.pump_k(omega_s + omega_i)? - (crystal.down_k(omega_s)? + crystal.down_k(omega_i)?))
}
