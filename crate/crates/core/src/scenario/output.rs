use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::dispersion::MaterialTable;
use crate::error::{Error, Result};
use crate::jsa::write_tpa;
use crate::observables::Spectrum;
use crate::scenario::config::{validate_config, ScenarioConfig};
use crate::scenario::pipeline::ScenarioResult;
use crate::scenario::sweep::SweepRow;
use crate::schmidt::write_modes;
use crate::units::nm_from_omega;

pub fn load_scenario(path: &Path, table: &MaterialTable) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path)?;
    validate_config(&text, table).map_err(Error::Config)
}

pub fn write_spectrum_csv(path: &Path, spec: &Spectrum) -> Result<()> {
    let mut f = BufWriter::new(fs::File::create(path)?);
    writeln!(f, "omega_rad_per_fs,wavelength_nm,intensity")?;
    for (j, v) in spec.values.iter().enumerate() {
        let w = spec.grid.omega(j);
        writeln!(f, "{:?},{:?},{:?}", w, nm_from_omega(w), v)?;
    }
    f.flush()?;
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `value,gain,K,g2,fwhm_nm,nrf,error`; missing observables are empty cells.
pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut f = BufWriter::new(fs::File::create(path)?);
    writeln!(f, "value,gain,K,g2,fwhm_nm,nrf,error")?;
    for r in rows {
        writeln!(
            f,
            "{:?},{},{},{},{},{},{}",
            r.value,
            opt(r.gain),
            opt(r.schmidt_number),
            opt(r.g2),
            opt(r.fwhm_nm),
            opt(r.nrf),
            quote(r.error.as_deref().unwrap_or(""))
        )?;
    }
    f.flush()?;
    Ok(())
}

pub fn report_json(result: &ScenarioResult) -> Result<String> {
    Ok(serde_json::to_string_pretty(&result.report)? + "\n")
}

fn gain_tag(g: f64) -> String {
    format!("{g}").replace('.', "p")
}

/// Writes report.json, spectrum.csv (first gain), spectra/G_<g>.csv,
/// modes/ and optionally tpa.txt. Returns the written paths.
pub fn write_outputs(result: &ScenarioResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let report = dir.join("report.json");
    fs::write(&report, report_json(result)?)?;
    written.push(report);

    if let Some(first) = result.spectra.first() {
        let p = dir.join("spectrum.csv");
        write_spectrum_csv(&p, first)?;
        written.push(p);
    }
    let sdir = dir.join("spectra");
    fs::create_dir_all(&sdir)?;
    for (g, spec) in result.gains.iter().zip(&result.spectra) {
        let p = sdir.join(format!("G_{}.csv", gain_tag(g.gain)));
        write_spectrum_csv(&p, spec)?;
        written.push(p);
    }

    if result.config.outputs.export_modes > 0 {
        let mdir = dir.join("modes");
        write_modes(&mdir, &result.decomposition, &result.gains, result.config.outputs.export_modes)?;
        written.push(mdir);
    }
    if result.config.outputs.dump_tpa {
        let p = dir.join("tpa.txt");
        let f = BufWriter::new(fs::File::create(&p)?);
        write_tpa(f, &result.tpa, &result.report.scenario_hash)?;
        written.push(p);
    }
    Ok(written)
}
