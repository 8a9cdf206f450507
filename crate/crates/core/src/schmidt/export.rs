use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::schmidt::{GainState, SchmidtDecomposition};
use crate::units::nm_from_omega;

#[derive(Serialize)]
struct GainEntry<'a> {
    gain: f64,
    reference: crate::schmidt::GainReference,
    schmidt_number: f64,
    weights: &'a [f64],
}

#[derive(Serialize)]
struct Manifest<'a> {
    rank_kept: usize,
    grid_points: usize,
    omega_step_rad_per_fs: f64,
    lambdas: &'a [f64],
    gains: Vec<GainEntry<'a>>,
    mode_files: Vec<String>,
}

/// Writes `mode_<n>.csv` (omega, wavelength, Re u, Im u) for the first
/// `count` modes and `manifest.json` into `dir`.
pub fn write_modes(dir: &Path, decomp: &SchmidtDecomposition, gains: &[GainState], count: usize) -> Result<()> {
    fs::create_dir_all(dir)?;
    let count = count.min(decomp.rank_kept);
    let mut files = Vec::with_capacity(count);
    for n in 0..count {
        let name = format!("mode_{n}.csv");
        let mut f = std::io::BufWriter::new(fs::File::create(dir.join(&name))?);
        writeln!(f, "omega_rad_per_fs,wavelength_nm,re_u,im_u")?;
        for (j, u) in decomp.modes_s[n].iter().enumerate() {
            let w = decomp.grid.omega(j);
            writeln!(f, "{:?},{:?},{:?},{:?}", w, nm_from_omega(w), u.re, u.im)?;
        }
        files.push(name);
    }
    let manifest = Manifest {
        rank_kept: decomp.rank_kept,
        grid_points: decomp.grid.len(),
        omega_step_rad_per_fs: decomp.grid.step,
        lambdas: &decomp.lambdas,
        gains: gains
            .iter()
            .map(|g| GainEntry {
                gain: g.gain,
                reference: g.reference,
                schmidt_number: g.schmidt_number(),
                weights: &g.weights,
            })
            .collect(),
        mode_files: files,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}
