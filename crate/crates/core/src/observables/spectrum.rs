use serde::Serialize;

use crate::error::{Error, Result};
use crate::jsa::FrequencyGrid;
use crate::schmidt::{GainState, SchmidtDecomposition};
use crate::units::nm_from_omega;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumScale {
    /// Lambda_n weights; integrates to one.
    Shape,
    /// sinh^2 r_n weights: photons per unit frequency.
    Photons,
    /// Shape rescaled to a maximum of one.
    PeakNormalized,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub grid: FrequencyGrid,
    pub values: Vec<f64>,
    pub scale: SpectrumScale,
}

/// <N(omega_s)> = sum_n |u_n|^2 w_n.
pub fn spectrum(decomp: &SchmidtDecomposition, gain: &GainState, scale: SpectrumScale) -> Result<Spectrum> {
    if !gain.matches(&decomp.lambdas) {
        return Err(Error::Inconsistent(
            "gain state was not built from this decomposition's eigenvalues".into(),
        ));
    }
    let w = match scale {
        SpectrumScale::Photons => &gain.mean_photons,
        _ => &gain.weights,
    };
    let n = decomp.grid.len();
    let mut values = vec![0.0; n];
    for (m, wm) in w.iter().enumerate() {
        for (v, u) in values.iter_mut().zip(&decomp.modes_s[m]) {
            *v += u.norm_sqr() * wm;
        }
    }
    if scale == SpectrumScale::PeakNormalized {
        let peak = values.iter().cloned().fold(0.0, f64::max);
        if peak > 0.0 {
            values.iter_mut().for_each(|v| *v /= peak);
        }
    }
    Ok(Spectrum {
        grid: decomp.grid,
        values,
        scale,
    })
}

impl Spectrum {
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.step
    }

    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (j, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = j;
            }
        }
        best
    }

    pub fn max(&self) -> f64 {
        self.values[self.argmax()]
    }
}

/// A full width, with the crossing frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Width {
    pub lower_rad_per_fs: f64,
    pub upper_rad_per_fs: f64,
    pub rad_per_fs: f64,
    pub nm: f64,
}

impl Width {
    fn new(lo: f64, hi: f64) -> Self {
        Self {
            lower_rad_per_fs: lo,
            upper_rad_per_fs: hi,
            rad_per_fs: hi - lo,
            nm: nm_from_omega(lo) - nm_from_omega(hi),
        }
    }
}

fn crossing(grid: &FrequencyGrid, v: &[f64], j: usize, level: f64) -> f64 {
    // level lies between v[j] and v[j + 1]
    let t = (level - v[j]) / (v[j + 1] - v[j]);
    grid.omega(j) + t * grid.step
}

fn walk_out(grid: &FrequencyGrid, v: &[f64], from: usize, level: f64, lo_bound: usize, hi_bound: usize) -> Result<Width> {
    let mut j = from;
    while j > lo_bound && v[j - 1] >= level {
        j -= 1;
    }
    if j == lo_bound {
        return Err(Error::Edge("lower"));
    }
    let lo = crossing(grid, v, j - 1, level);
    let mut k = from;
    while k < hi_bound && v[k + 1] >= level {
        k += 1;
    }
    if k == hi_bound {
        return Err(Error::Edge("upper"));
    }
    let hi = crossing(grid, v, k, level);
    Ok(Width::new(lo, hi))
}

/// Width at half maximum around the global peak, linearly interpolated.
pub fn fwhm(spec: &Spectrum) -> Result<Width> {
    let p = spec.argmax();
    walk_out(&spec.grid, &spec.values, p, 0.5 * spec.values[p], 0, spec.values.len() - 1)
}

/// Distance between the outermost half-maximum crossings. Fringes inside an
/// envelope do not shorten it.
pub fn envelope_fwhm(spec: &Spectrum) -> Result<Width> {
    let v = &spec.values;
    let half = 0.5 * spec.max();
    let first = v.iter().position(|x| *x >= half).unwrap_or(0);
    let last = v.iter().rposition(|x| *x >= half).unwrap_or(0);
    if first == 0 {
        return Err(Error::Edge("lower"));
    }
    if last == v.len() - 1 {
        return Err(Error::Edge("upper"));
    }
    Ok(Width::new(
        crossing(&spec.grid, v, first - 1, half),
        crossing(&spec.grid, v, last, half),
    ))
}

#[derive(Debug, Clone, Copy)]
pub struct PeakOptions {
    /// Fraction of the global maximum a peak must reach.
    pub threshold: f64,
    /// Above-threshold regions closer than this (rad/fs) belong to one peak.
    pub merge_gap: f64,
}

impl Default for PeakOptions {
    fn default() -> Self {
        Self {
            threshold: 0.1,
            merge_gap: 0.03,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub omega_max_rad_per_fs: f64,
    pub wavelength_max_nm: f64,
    /// Intensity-weighted centre of the peak region.
    pub omega_centroid_rad_per_fs: f64,
    pub wavelength_centroid_nm: f64,
    pub height: f64,
    /// Outermost half-height crossings within the peak region.
    pub width: Option<Width>,
}

/// Peaks reaching `threshold` of the global maximum, ascending in frequency.
pub fn peaks(spec: &Spectrum, opts: &PeakOptions) -> Vec<Peak> {
    let v = &spec.values;
    let g = &spec.grid;
    let level = opts.threshold * spec.max();
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut j = 0;
    while j < v.len() {
        if v[j] >= level {
            let s = j;
            while j + 1 < v.len() && v[j + 1] >= level {
                j += 1;
            }
            match runs.last_mut() {
                Some(last) if g.omega(s) - g.omega(last.1) < opts.merge_gap => last.1 = j,
                _ => runs.push((s, j)),
            }
        }
        j += 1;
    }
    runs.into_iter()
        .map(|(s, e)| {
            let mut top = s;
            let mut mass = 0.0;
            let mut moment = 0.0;
            for k in s..=e {
                if v[k] > v[top] {
                    top = k;
                }
                mass += v[k];
                moment += v[k] * g.omega(k);
            }
            let centroid = moment / mass;
            let half = 0.5 * v[top];
            let first = (s..=e).find(|&k| v[k] >= half).unwrap();
            let last = (s..=e).rev().find(|&k| v[k] >= half).unwrap();
            let width = if first > 0 && last + 1 < v.len() {
                Some(Width::new(crossing(g, v, first - 1, half), crossing(g, v, last, half)))
            } else {
                None
            };
            Peak {
                omega_max_rad_per_fs: g.omega(top),
                wavelength_max_nm: nm_from_omega(g.omega(top)),
                omega_centroid_rad_per_fs: centroid,
                wavelength_centroid_nm: nm_from_omega(centroid),
                height: v[top],
                width,
            }
        })
        .collect()
}

/// RMS deviation from a moving average of width `window` (rad/fs), relative
/// to the mean of that average, over grid points in [lower, upper).
pub fn fringe_visibility(spec: &Spectrum, lower: f64, upper: f64, window: f64) -> f64 {
    let v = &spec.values;
    let g = &spec.grid;
    let h = ((window / g.step / 2.0).round() as usize).max(1);
    let mut dev = 0.0;
    let mut base = 0.0;
    let mut count = 0usize;
    for j in h..v.len().saturating_sub(h) {
        let w = g.omega(j);
        if w < lower || w >= upper {
            continue;
        }
        let avg = v[j - h..=j + h].iter().sum::<f64>() / (2 * h + 1) as f64;
        dev += (v[j] - avg).powi(2);
        base += avg;
        count += 1;
    }
    if count == 0 || base == 0.0 {
        return 0.0;
    }
    (dev / count as f64).sqrt() / (base / count as f64)
}

/// g2 = 1 + 2/K for degenerate BSV.
pub fn g2_integral(gain: &GainState) -> f64 {
    1.0 + 2.0 / gain.schmidt_number()
}

/// As `g2_integral`, refusing non-degenerate configurations.
pub fn g2_checked(decomp: &SchmidtDecomposition, gain: &GainState) -> Result<f64> {
    if !decomp.symmetric {
        return Err(Error::Unsupported(
            "g2 = 1 + 2/K holds for the degenerate case only".into(),
        ));
    }
    Ok(g2_integral(gain))
}
