use faer::{c64, Mat};
use std::f64::consts::PI;

use crate::dispersion::{
    crystal_mismatch, interferometer_phase, wavevector, Geometry, InterferometerMedia,
    TypeICrystal,
};
use crate::error::{Error, Result};
use crate::jsa::grid::{FrequencyGrid, PumpConfig};
use crate::units::cm_to_mm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Modulation {
    /// cos(Theta) exp(-i Theta)
    #[default]
    Interference,
    /// Modulation factor forced to 1. Diagnostic hook.
    Unity,
}

/// Second crystal, GVD medium and lock phase.
#[derive(Debug, Clone)]
pub struct InterferometerSetup {
    pub geometry: Geometry,
    pub media: InterferometerMedia,
    /// Added to Theta, rad.
    pub phase_offset: f64,
    pub modulation: Modulation,
}

/// Pointwise TPA, unnormalized (C = 1).
#[derive(Debug, Clone)]
pub struct TpaModel {
    pub pump: PumpConfig,
    pub crystal: TypeICrystal,
    pub interferometer: Option<InterferometerSetup>,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

impl TpaModel {
    pub fn single_crystal(pump: PumpConfig, crystal: TypeICrystal) -> Self {
        Self {
            pump,
            crystal,
            interferometer: None,
        }
    }

    /// Full cosine argument Theta = Dk L / 2 + phi + offset.
    pub fn theta(&self, omega_s: f64, omega_i: f64) -> Result<f64> {
        let half = crystal_mismatch(omega_s, omega_i, &self.crystal)? * self.crystal.length_mm / 2.0;
        match &self.interferometer {
            None => Ok(half),
            Some(ifm) => Ok(half
                + interferometer_phase(omega_s, omega_i, &ifm.geometry, &ifm.media)?
                + ifm.phase_offset),
        }
    }

    pub fn amplitude(&self, omega_s: f64, omega_i: f64) -> Result<c64> {
        let dk = crystal_mismatch(omega_s, omega_i, &self.crystal)?;
        let x = dk * self.crystal.length_mm / 2.0;
        let detune = omega_s + omega_i - self.pump.omega();
        let omega = self.pump.bandwidth();
        let env = (-detune * detune / (2.0 * omega * omega)).exp() * sinc(x);
        let mut f = c64::from_polar(env, -x);
        if let Some(ifm) = &self.interferometer {
            if ifm.modulation == Modulation::Interference {
                let th = self.theta(omega_s, omega_i)?;
                f *= th.cos() * c64::from_polar(1.0, -th);
            }
        }
        Ok(f)
    }

    /// Offset that sets Theta(lock, omega_p - lock) = 0 mod 2 pi, wrapped to
    /// (-pi, pi]. Any existing offset is ignored.
    pub fn lock_offset(&self, lock_omega: f64) -> Result<f64> {
        let mut bare = self.clone();
        if let Some(ifm) = bare.interferometer.as_mut() {
            ifm.phase_offset = 0.0;
        }
        let th = bare.theta(lock_omega, self.pump.omega() - lock_omega)?;
        let mut off = -th.rem_euclid(2.0 * PI);
        if off <= -PI {
            off += 2.0 * PI;
        }
        Ok(off)
    }

    /// Samples the model on the grid without normalization.
    pub fn sample(&self, grid: &FrequencyGrid) -> Result<Mat<c64>> {
        let n = grid.len();
        let c = &self.crystal;
        let ko = (0..n)
            .map(|j| c.down_k(grid.omega(j)))
            .collect::<Result<Vec<_>>>()?;
        let sums: Vec<f64> = (0..2 * n - 1).map(|m| grid.pair_sum(m)).collect();
        let kp = sums.iter().map(|&s| c.pump_k(s)).collect::<Result<Vec<_>>>()?;
        let wp = self.pump.omega();
        let om = self.pump.bandwidth();
        let gauss: Vec<f64> = sums
            .iter()
            .map(|&s| (-(s - wp) * (s - wp) / (2.0 * om * om)).exp())
            .collect();

        // Theta = x + (ka_p (d0 + da) - ka_s da - ka_i da - (kg_s + kg_i) d) / 2 + offset
        let ifm = self.interferometer.as_ref().filter(|i| i.modulation == Modulation::Interference);
        let (pump_term, axis_term, offset) = match ifm {
            None => (vec![], vec![], 0.0),
            Some(i) => {
                let g = &i.geometry;
                let d = cm_to_mm(g.gvd_length_cm);
                let da = cm_to_mm(g.air_gap_cm);
                let d0 = cm_to_mm(g.pump_path_cm);
                let pt = sums
                    .iter()
                    .map(|&s| Ok(wavevector(&i.media.air, s)? * (d0 + da) / 2.0))
                    .collect::<Result<Vec<_>>>()?;
                let at = (0..n)
                    .map(|j| {
                        let w = grid.omega(j);
                        let mut t = 0.0;
                        if da != 0.0 {
                            t += wavevector(&i.media.air, w)? * da;
                        }
                        if d != 0.0 {
                            t += wavevector(&i.media.gvd, w)? * d;
                        }
                        Ok(t / 2.0)
                    })
                    .collect::<Result<Vec<_>>>()?;
                (pt, at, i.phase_offset)
            }
        };

        let half_l = c.length_mm / 2.0;
        let mut out = Mat::<c64>::zeros(n, n);
        for k in 0..n {
            for j in 0..n {
                let m = j + k;
                let x = (kp[m] - (ko[j] + ko[k])) * half_l;
                let env = gauss[m] * sinc(x);
                let mut f = c64::from_polar(env, -x);
                if ifm.is_some() {
                    let th = x + pump_term[m] - (axis_term[j] + axis_term[k]) + offset;
                    f *= th.cos() * c64::from_polar(1.0, -th);
                }
                out[(j, k)] = f;
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// sum |F|^2 dw^2 = 1
    UnitL2,
    Raw,
}

/// F(omega_s, omega_i) on a grid; rows are signal, columns idler.
#[derive(Debug, Clone)]
pub struct JointSpectralAmplitude {
    pub grid: FrequencyGrid,
    pub values: Mat<c64>,
    pub normalization: Normalization,
}

impl JointSpectralAmplitude {
    pub fn from_raw(grid: FrequencyGrid, values: Mat<c64>) -> Result<Self> {
        if values.nrows() != grid.len() || values.ncols() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "matrix {}x{} does not match grid of {}",
                values.nrows(),
                values.ncols(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            values,
            normalization: Normalization::Raw,
        })
    }

    /// sum |F|^2 dw^2
    pub fn norm_sqr(&self) -> f64 {
        let dw = self.grid.step;
        let mut s = 0.0;
        for k in 0..self.values.ncols() {
            for j in 0..self.values.nrows() {
                s += self.values[(j, k)].norm_sqr();
            }
        }
        s * dw * dw
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 > 0.0 && n2.is_finite()) {
            return Err(Error::Numerical(format!(
                "TPA norm is {n2}; nothing to normalize on this grid"
            )));
        }
        let s = n2.sqrt().recip();
        for k in 0..self.values.ncols() {
            for j in 0..self.values.nrows() {
                self.values[(j, k)] *= s;
            }
        }
        self.normalization = Normalization::UnitL2;
        Ok(self)
    }

    pub fn get(&self, j: usize, k: usize) -> c64 {
        self.values[(j, k)]
    }

    /// Marginal sum_k |F_jk|^2 dw over the idler axis.
    pub fn marginal(&self) -> Vec<f64> {
        let n = self.grid.len();
        (0..n)
            .map(|j| (0..n).map(|k| self.values[(j, k)].norm_sqr()).sum::<f64>() * self.grid.step)
            .collect()
    }

    /// Larger of the two edge marginal values relative to the marginal peak.
    pub fn edge_ratio(&self) -> f64 {
        let m = self.marginal();
        let peak = m.iter().cloned().fold(0.0, f64::max);
        m[0].max(m[m.len() - 1]) / peak
    }

    /// max |F - F^T| / max |F|
    pub fn transpose_asymmetry(&self) -> f64 {
        let n = self.grid.len();
        let mut worst: f64 = 0.0;
        let mut peak: f64 = 0.0;
        for k in 0..n {
            for j in 0..n {
                peak = peak.max(self.values[(j, k)].norm());
                worst = worst.max((self.values[(j, k)] - self.values[(k, j)]).norm());
            }
        }
        worst / peak
    }
}

/// Single-crystal TPA, normalized.
pub fn build_single_crystal_tpa(
    grid: &FrequencyGrid,
    pump: &PumpConfig,
    crystal: &TypeICrystal,
) -> Result<JointSpectralAmplitude> {
    let model = TpaModel::single_crystal(*pump, crystal.clone());
    JointSpectralAmplitude::from_raw(*grid, model.sample(grid)?)?.normalized()
}

/// Two crystals with a GVD medium in between, normalized.
pub fn build_interferometer_tpa(
    grid: &FrequencyGrid,
    pump: &PumpConfig,
    crystal: &TypeICrystal,
    setup: &InterferometerSetup,
) -> Result<JointSpectralAmplitude> {
    setup.geometry.validate()?;
    let model = TpaModel {
        pump: *pump,
        crystal: crystal.clone(),
        interferometer: Some(setup.clone()),
    };
    JointSpectralAmplitude::from_raw(*grid, model.sample(grid)?)?.normalized()
}

/// Phase offset locking Theta to 0 mod 2 pi at (lock, omega_p - lock).
pub fn phase_lock(
    pump: &PumpConfig,
    crystal: &TypeICrystal,
    setup: &InterferometerSetup,
    lock_omega: f64,
) -> Result<f64> {
    TpaModel {
        pump: *pump,
        crystal: crystal.clone(),
        interferometer: Some(setup.clone()),
    }
    .lock_offset(lock_omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_limits() {
        assert_eq!(sinc(0.0), 1.0);
        assert!((sinc(1e-9) - 1.0).abs() < 1e-15);
        assert!((sinc(PI)).abs() < 1e-15);
        assert!((sinc(0.5) - 0.5f64.sin() / 0.5).abs() < 1e-16);
    }
}
