#![allow(dead_code)]

pub mod fock;

use std::path::PathBuf;

use bsv::dispersion::MaterialTable;
use bsv::jsa::FrequencyGrid;
use bsv::scenario::{load_scenario, ScenarioConfig};
use bsv::schmidt::SchmidtDecomposition;
use faer::{c64, Mat};

pub fn table() -> MaterialTable {
    MaterialTable::builtin()
}

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(format!("{name}.toml"))
}

pub fn fixture(name: &str) -> ScenarioConfig {
    load_scenario(&scenario_path(name), &table()).expect("fixture parses")
}

pub fn matrix(n: usize, f: impl Fn(usize, usize) -> c64) -> Mat<c64> {
    Mat::from_fn(n, n, f)
}

pub fn real(x: f64) -> c64 {
    c64::new(x, 0.0)
}

/// Hand-built decomposition with the given orthonormal (dw-weighted) modes.
pub fn toy_decomposition(grid: FrequencyGrid, lambdas: Vec<f64>, modes_s: Vec<Vec<c64>>, modes_i: Vec<Vec<c64>>) -> SchmidtDecomposition {
    let k = lambdas.len();
    SchmidtDecomposition {
        grid,
        all_lambdas: lambdas.clone(),
        lambdas,
        modes_s,
        modes_i,
        rank_kept: k,
        symmetric: true,
    }
}
