//! Text dump of a TPA matrix.
//!
//! ```text
//! # bsv-tpa 1
//! # n <N>
//! # omega_center_rad_per_fs <value>
//! # omega_step_rad_per_fs <value>
//! # normalization unit_l2|raw
//! # scenario_hash <hex>
//! # layout row-major; row = signal index, column = idler index, both ascending in omega
//! <re> <im>
//! ...
//! ```
//! One entry per line, N*N lines.

use faer::{c64, Mat};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::jsa::grid::FrequencyGrid;
use crate::jsa::tpa::{JointSpectralAmplitude, Normalization};

pub fn write_tpa<W: Write>(mut w: W, tpa: &JointSpectralAmplitude, scenario_hash: &str) -> Result<()> {
    let g = &tpa.grid;
    writeln!(w, "# bsv-tpa 1")?;
    writeln!(w, "# n {}", g.n)?;
    writeln!(w, "# omega_center_rad_per_fs {:?}", g.center)?;
    writeln!(w, "# omega_step_rad_per_fs {:?}", g.step)?;
    let norm = match tpa.normalization {
        Normalization::UnitL2 => "unit_l2",
        Normalization::Raw => "raw",
    };
    writeln!(w, "# normalization {norm}")?;
    writeln!(w, "# scenario_hash {scenario_hash}")?;
    writeln!(
        w,
        "# layout row-major; row = signal index, column = idler index, both ascending in omega"
    )?;
    for j in 0..g.n {
        for k in 0..g.n {
            let v = tpa.values[(j, k)];
            writeln!(w, "{:?} {:?}", v.re, v.im)?;
        }
    }
    Ok(())
}

pub fn read_tpa<R: BufRead>(r: R) -> Result<(JointSpectralAmplitude, String)> {
    let bad = |m: &str| Error::Inconsistent(format!("TPA dump: {m}"));
    let mut n = None;
    let mut center = None;
    let mut step = None;
    let mut norm = Normalization::Raw;
    let mut hash = String::new();
    let mut vals = Vec::new();
    for line in r.lines() {
        let line = line?;
        if let Some(h) = line.strip_prefix('#') {
            let mut it = h.split_whitespace();
            match (it.next(), it.next()) {
                (Some("n"), Some(v)) => n = v.parse::<usize>().ok(),
                (Some("omega_center_rad_per_fs"), Some(v)) => center = v.parse::<f64>().ok(),
                (Some("omega_step_rad_per_fs"), Some(v)) => step = v.parse::<f64>().ok(),
                (Some("normalization"), Some("unit_l2")) => norm = Normalization::UnitL2,
                (Some("scenario_hash"), Some(v)) => hash = v.to_string(),
                _ => {}
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace().map(str::parse::<f64>);
        match (it.next(), it.next()) {
            (Some(Ok(re)), Some(Ok(im))) => vals.push(c64::new(re, im)),
            _ => return Err(bad(&format!("bad entry `{line}`"))),
        }
    }
    let n = n.ok_or_else(|| bad("missing n"))?;
    let grid = FrequencyGrid {
        center: center.ok_or_else(|| bad("missing center"))?,
        step: step.ok_or_else(|| bad("missing step"))?,
        n,
    };
    if vals.len() != n * n {
        return Err(bad(&format!("expected {} entries, found {}", n * n, vals.len())));
    }
    let values = Mat::from_fn(n, n, |j, k| vals[j * n + k]);
    let mut tpa = JointSpectralAmplitude::from_raw(grid, values)?;
    tpa.normalization = norm;
    Ok((tpa, hash))
}
