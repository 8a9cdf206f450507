use serde::Serialize;

use crate::dispersion::{
    find_pump_path, gvd, Geometry, InterferometerMedia, MaterialTable, PumpPathOptions, TypeICrystal,
};
use crate::error::{Error, Result};
use crate::jsa::{
    build_interferometer_tpa, build_single_crystal_tpa, phase_lock, FrequencyGrid,
    InterferometerSetup, JointSpectralAmplitude, Modulation, PumpConfig,
};
use crate::observables::{
    band_moments, envelope_fwhm, fwhm, g2_checked, nrf, peaks, spectrum, Peak, PeakOptions,
    SpectralBand, Spectrum, SpectrumScale, Width,
};
use crate::scenario::config::{NrfSplit, ScenarioConfig};
use crate::schmidt::{decompose, redistribute_with, DecomposeOptions, GainState, SchmidtDecomposition, Truncation};
use crate::units::{nm_from_omega, omega_from_nm};

/// Physical objects built from a config, before the TPA.
#[derive(Debug, Clone)]
pub struct Setup {
    pub pump: PumpConfig,
    pub crystal: TypeICrystal,
    pub interferometer: Option<InterferometerSetup>,
    pub grid: FrequencyGrid,
    pub lock_omega: f64,
}

/// Default grid half span: the larger of 5 pump bandwidths and twice the
/// difference-frequency detuning at the first zero of the phase-matching sinc.
pub fn default_half_span(pump: &PumpConfig, crystal: &TypeICrystal) -> Result<f64> {
    let w0 = pump.omega() / 2.0;
    let k2 = gvd(&crystal.ordinary, w0)?.abs();
    let first_zero = (2.0 * std::f64::consts::PI / (k2 * crystal.length_mm)).sqrt();
    Ok((5.0 * pump.bandwidth()).max(2.0 * first_zero).min(0.9 * w0))
}

pub fn prepare(cfg: &ScenarioConfig, table: &MaterialTable) -> Result<Setup> {
    let pump = match (cfg.pump.fwhm_fs, cfg.pump.tau_fs) {
        (Some(f), _) => PumpConfig::from_fwhm(cfg.pump.wavelength_nm, f),
        (None, Some(t)) => PumpConfig {
            wavelength_nm: cfg.pump.wavelength_nm,
            tau_fs: t,
        },
        (None, None) => return Err(Error::Precondition("pump duration missing".into())),
    };
    let crystal = TypeICrystal::phase_matched(
        table.get(&cfg.crystal.ordinary)?.clone(),
        table.get(&cfg.crystal.extraordinary)?.clone(),
        cfg.crystal.length_mm,
        pump.omega(),
    )?;
    let lock_omega = cfg.lock.wavelength_nm.map(omega_from_nm).unwrap_or(pump.omega() / 2.0);

    let interferometer = match &cfg.interferometer {
        None => None,
        Some(i) => {
            let media = InterferometerMedia {
                gvd: table.get(&i.gvd_material)?.clone(),
                air: table.get(&i.air_material)?.clone(),
            };
            let mut geometry = Geometry {
                crystal_length_mm: cfg.crystal.length_mm,
                gvd_length_cm: i.gvd_length_cm,
                air_gap_cm: i.air_gap_cm,
                pump_path_cm: i.pump_path_cm.unwrap_or(0.0),
            };
            if i.pump_path_cm.is_none() {
                let opts = PumpPathOptions {
                    extremum: i.extremum,
                    ..Default::default()
                };
                geometry.pump_path_cm =
                    find_pump_path(lock_omega, pump.omega(), &geometry, &media, &crystal, &opts)?;
            }
            geometry.validate()?;
            let mut setup = InterferometerSetup {
                geometry,
                media,
                phase_offset: 0.0,
                modulation: Modulation::Interference,
            };
            setup.phase_offset = cfg.lock.phase_offset_rad
                + if cfg.lock.enabled {
                    phase_lock(&pump, &crystal, &setup, lock_omega)?
                } else {
                    0.0
                };
            Some(setup)
        }
    };
    let half = match cfg.grid.half_span_rad_per_fs {
        Some(h) => h,
        None => default_half_span(&pump, &crystal)?,
    };
    let grid = FrequencyGrid::new(pump.omega() / 2.0, half, cfg.grid.points)?;
    Ok(Setup {
        pump,
        crystal,
        interferometer,
        grid,
        lock_omega,
    })
}

pub fn build_tpa(setup: &Setup) -> Result<JointSpectralAmplitude> {
    match &setup.interferometer {
        None => build_single_crystal_tpa(&setup.grid, &setup.pump, &setup.crystal),
        Some(i) => build_interferometer_tpa(&setup.grid, &setup.pump, &setup.crystal, i),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridReport {
    pub points: usize,
    pub center_rad_per_fs: f64,
    pub step_rad_per_fs: f64,
    pub half_span_rad_per_fs: f64,
    pub edge_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BandReport {
    pub name: String,
    pub lower_rad_per_fs: f64,
    pub upper_rad_per_fs: f64,
    pub lower_nm: f64,
    pub upper_nm: f64,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NrfReport {
    pub split: NrfSplit,
    pub signal: SpectralBand,
    pub idler: SpectralBand,
    pub divider_nm: Option<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GainReport {
    pub gain: f64,
    pub schmidt_number: f64,
    pub g2: Option<f64>,
    pub total_photons: f64,
    pub fwhm: Option<Width>,
    pub envelope_fwhm: Option<Width>,
    pub peaks: Vec<Peak>,
    pub bands: Vec<BandReport>,
    pub nrf: Option<NrfReport>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scenario: String,
    pub scenario_hash: String,
    pub material_table_version: String,
    pub library_version: String,
    pub grid: GridReport,
    pub phase_matching_angle_deg: f64,
    pub pump_path_cm: Option<f64>,
    pub phase_offset_rad: Option<f64>,
    pub lock_wavelength_nm: f64,
    pub rank_kept: usize,
    pub discarded_weight: f64,
    pub degenerate: bool,
    pub lambdas_head: Vec<f64>,
    pub gain_reference: crate::schmidt::GainReference,
    pub results: Vec<GainReport>,
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub setup: Setup,
    pub tpa: JointSpectralAmplitude,
    pub decomposition: SchmidtDecomposition,
    pub gains: Vec<GainState>,
    /// Peak-normalized spectra, one per gain.
    pub spectra: Vec<Spectrum>,
    pub report: Report,
}

/// Index of the spectral minimum between the two strongest peaks.
pub fn inter_peak_minimum(spec: &Spectrum, found: &[Peak]) -> Option<usize> {
    if found.len() < 2 {
        return None;
    }
    let mut by_height: Vec<&Peak> = found.iter().collect();
    by_height.sort_by(|a, b| b.height.total_cmp(&a.height));
    let a = spec.grid.nearest(by_height[0].omega_max_rad_per_fs);
    let b = spec.grid.nearest(by_height[1].omega_max_rad_per_fs);
    let (lo, hi) = (a.min(b), a.max(b));
    (lo..=hi).min_by(|&x, &y| spec.values[x].total_cmp(&spec.values[y]))
}

/// Two disjoint bands covering the grid, split at `split_omega` (rad/fs).
pub fn split_bands(grid: &FrequencyGrid, split_omega: f64) -> Result<(SpectralBand, SpectralBand)> {
    let full = SpectralBand::full(grid);
    Ok((
        SpectralBand::new(full.lower, split_omega)?,
        SpectralBand::new(split_omega, full.upper)?,
    ))
}

fn evaluate_gain(
    cfg: &ScenarioConfig,
    decomp: &SchmidtDecomposition,
    gain: &GainState,
    peak_opts: &PeakOptions,
) -> Result<(GainReport, Spectrum)> {
    let mut notes = Vec::new();
    let spec = spectrum(decomp, gain, SpectrumScale::PeakNormalized)?;
    let g2 = match g2_checked(decomp, gain) {
        Ok(v) => Some(v),
        Err(e) => {
            notes.push(e.to_string());
            None
        }
    };
    let width = fwhm(&spec).map_err(|e| notes.push(format!("fwhm: {e}"))).ok();
    let env = envelope_fwhm(&spec).map_err(|e| notes.push(format!("envelope fwhm: {e}"))).ok();
    let found = peaks(&spec, peak_opts);

    let mut bands = Vec::new();
    for b in &cfg.bands {
        let band = SpectralBand::from_nm(b.lower_nm, b.upper_nm)?;
        let m = band_moments(decomp, gain, &band)?;
        bands.push(BandReport {
            name: b.name.clone(),
            lower_rad_per_fs: band.lower,
            upper_rad_per_fs: band.upper,
            lower_nm: b.lower_nm,
            upper_nm: b.upper_nm,
            mean: m.mean,
            variance: m.variance,
        });
    }

    let grid = &decomp.grid;
    let split = match cfg.nrf.split {
        NrfSplit::None => None,
        NrfSplit::Degenerate => Some((split_bands(grid, grid.center)?, Some(grid.center))),
        NrfSplit::InterPeakMinimum => match inter_peak_minimum(&spec, &found) {
            Some(j) => Some((split_bands(grid, grid.omega(j))?, Some(grid.omega(j)))),
            None => {
                notes.push(format!("nrf: inter-peak minimum needs two peaks, found {}", found.len()));
                None
            }
        },
        NrfSplit::Bands => Some((
            (
                SpectralBand::from_nm(cfg.bands[0].lower_nm, cfg.bands[0].upper_nm)?,
                SpectralBand::from_nm(cfg.bands[1].lower_nm, cfg.bands[1].upper_nm)?,
            ),
            None,
        )),
    };
    let nrf_report = match split {
        Some(((s, i), divider)) if gain.gain > 0.0 => Some(NrfReport {
            split: cfg.nrf.split,
            signal: s,
            idler: i,
            divider_nm: divider.map(nm_from_omega),
            value: nrf(decomp, gain, &s, &i)?,
        }),
        Some(_) => {
            notes.push("nrf: undefined at G = 0".into());
            None
        }
        None => None,
    };

    Ok((
        GainReport {
            gain: gain.gain,
            schmidt_number: gain.schmidt_number(),
            g2,
            total_photons: gain.total_photons(),
            fwhm: width,
            envelope_fwhm: env,
            peaks: found,
            bands,
            nrf: nrf_report,
            notes,
        },
        spec,
    ))
}

/// Full pipeline for one configuration. Deterministic.
pub fn run_scenario(cfg: &ScenarioConfig, table: &MaterialTable) -> Result<ScenarioResult> {
    let setup = prepare(cfg, table)?;
    let tpa = build_tpa(&setup)?;
    let edge_ratio = tpa.edge_ratio();
    if edge_ratio > cfg.grid.max_edge_ratio {
        return Err(Error::InvalidGrid(format!(
            "marginal at the grid edge is {edge_ratio:.3e} of its peak (limit {:.1e}); widen grid.half_span_rad_per_fs",
            cfg.grid.max_edge_ratio
        )));
    }
    let opts = DecomposeOptions {
        truncation: Truncation {
            cumulative_tolerance: cfg.schmidt.cumulative_tolerance,
            max_rank: cfg.schmidt.max_rank,
        },
        degeneracy_tolerance: cfg.schmidt.degeneracy_tolerance,
    };
    let decomposition = decompose(&tpa, &opts)?;
    let peak_opts = PeakOptions {
        threshold: cfg.observables.peak_threshold,
        merge_gap: cfg.observables.peak_merge_gap_rad_per_fs,
    };

    let mut gains = Vec::new();
    let mut spectra = Vec::new();
    let mut results = Vec::new();
    for &g in &cfg.gain.values {
        let state = redistribute_with(&decomposition.lambdas, g, cfg.gain.reference)?;
        let (rep, spec) = evaluate_gain(cfg, &decomposition, &state, &peak_opts)?;
        gains.push(state);
        spectra.push(spec);
        results.push(rep);
    }

    let report = Report {
        scenario: cfg.name.clone(),
        scenario_hash: cfg.hash(),
        material_table_version: table.version.clone(),
        library_version: crate::VERSION.to_string(),
        grid: GridReport {
            points: setup.grid.n,
            center_rad_per_fs: setup.grid.center,
            step_rad_per_fs: setup.grid.step,
            half_span_rad_per_fs: setup.grid.half_span(),
            edge_ratio,
        },
        phase_matching_angle_deg: setup.crystal.theta.to_degrees(),
        pump_path_cm: setup.interferometer.as_ref().map(|i| i.geometry.pump_path_cm),
        phase_offset_rad: setup.interferometer.as_ref().map(|i| i.phase_offset),
        lock_wavelength_nm: nm_from_omega(setup.lock_omega),
        rank_kept: decomposition.rank_kept,
        discarded_weight: decomposition.discarded_weight(),
        degenerate: decomposition.symmetric,
        lambdas_head: decomposition.lambdas.iter().take(10).cloned().collect(),
        gain_reference: cfg.gain.reference,
        results,
    };
    Ok(ScenarioResult {
        config: cfg.clone(),
        setup,
        tpa,
        decomposition,
        gains,
        spectra,
        report,
    })
}
