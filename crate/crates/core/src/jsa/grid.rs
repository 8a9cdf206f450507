use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::omega_from_nm;

/// Uniform frequency axis symmetric about `center` (rad/fs). The same axis is
/// used for signal and idler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub center: f64,
    pub step: f64,
    pub n: usize,
}

impl FrequencyGrid {
    /// Grid of `n` points covering `center +- half_span`.
    pub fn new(center: f64, half_span: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        if !(half_span > 0.0 && half_span < center && center.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "half span {half_span} rad/fs must be in (0, {center})"
            )));
        }
        Ok(Self {
            center,
            step: 2.0 * half_span / (n - 1) as f64,
            n,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn half_span(&self) -> f64 {
        0.5 * self.step * (self.n - 1) as f64
    }

    #[inline]
    pub fn omega(&self, j: usize) -> f64 {
        self.center + (j as f64 - 0.5 * (self.n - 1) as f64) * self.step
    }

    /// omega_j + omega_k expressed through m = j + k.
    #[inline]
    pub fn pair_sum(&self, m: usize) -> f64 {
        2.0 * self.center + (m as f64 - (self.n - 1) as f64) * self.step
    }

    pub fn omegas(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.omega(j)).collect()
    }

    pub fn wavelengths_nm(&self) -> Vec<f64> {
        (0..self.n).map(|j| crate::units::nm_from_omega(self.omega(j))).collect()
    }

    /// Index of the reflected point omega -> 2 center - omega.
    #[inline]
    pub fn reflect(&self, j: usize) -> usize {
        self.n - 1 - j
    }

    pub fn first(&self) -> f64 {
        self.omega(0)
    }

    pub fn last(&self) -> f64 {
        self.omega(self.n - 1)
    }

    /// Nearest grid index to omega (clamped).
    pub fn nearest(&self, omega: f64) -> usize {
        let x = (omega - self.first()) / self.step;
        x.round().clamp(0.0, (self.n - 1) as f64) as usize
    }
}

/// Pump pulse. Omega = 1/tau; intensity FWHM = 2 sqrt(ln 2) tau.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpConfig {
    pub wavelength_nm: f64,
    pub tau_fs: f64,
}

impl PumpConfig {
    pub fn from_fwhm(wavelength_nm: f64, fwhm_fs: f64) -> Self {
        Self {
            wavelength_nm,
            tau_fs: fwhm_fs / (2.0 * 2f64.ln().sqrt()),
        }
    }

    pub fn omega(&self) -> f64 {
        omega_from_nm(self.wavelength_nm)
    }

    /// Spectral bandwidth Omega, rad/fs.
    pub fn bandwidth(&self) -> f64 {
        1.0 / self.tau_fs
    }

    pub fn fwhm_fs(&self) -> f64 {
        2.0 * 2f64.ln().sqrt() * self.tau_fs
    }
}
