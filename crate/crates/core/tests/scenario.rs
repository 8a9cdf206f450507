mod common;

use std::process::Command;

use bsv::dispersion::MaterialTable;
use bsv::scenario::*;
use bsv::Error;
use common::{scenario_path, table};

const SMALL: &str = r#"
name = "small"

[pump]
wavelength_nm = 400.0
fwhm_fs = 1000.0

[crystal]
ordinary = "BBO_o"
extraordinary = "BBO_e"
length_mm = 3.0

[gain]
values = [1.0, 4.0, 9.0]
reference = "leading-mode"

[grid]
points = 256
half_span_rad_per_fs = 0.3
"#;

const SMALL_INTERFEROMETER: &str = r#"
[interferometer]
gvd_material = "SF6"
gvd_length_cm = 0.5

[lock]
enabled = true
"#;

fn small() -> ScenarioConfig {
    validate_config(SMALL, &table()).unwrap()
}

fn issues(text: &str) -> Vec<ConfigIssue> {
    validate_config(text, &table()).unwrap_err()
}

#[test]
fn every_fixture_validates_and_round_trips() {
    for name in ["single_crystal", "degenerate_36cm", "fringe_period", "g2_vs_length", "two_color", "two_color_modes"] {
        let cfg = load_scenario(&scenario_path(name), &table()).unwrap();
        assert_eq!(cfg.name, name);
        let again = validate_config(&cfg.to_toml(), &table()).unwrap();
        assert_eq!(again.hash(), cfg.hash(), "{name}");
    }
}

#[test]
fn missing_required_field_named() {
    let text = SMALL.replace("wavelength_nm = 400.0\n", "");
    let found = issues(&text);
    assert!(found.iter().any(|i| i.path == "pump.wavelength_nm"), "{found:?}");
}

#[test]
fn problems_reported_together() {
    let text = format!("{SMALL}{SMALL_INTERFEROMETER}")
        .replace("gvd_length_cm = 0.5", "gvd_length_cm = -2.0")
        .replace("length_mm = 3.0", "length_mm = 3.0\ncolour = \"blue\"");
    let found = issues(&text);
    assert!(found.iter().any(|i| i.path == "interferometer.gvd_length_cm"), "{found:?}");
    assert!(found.iter().any(|i| i.path == "crystal.colour" && i.message.contains("unknown")));
    assert!(found.len() >= 2);
}

#[test]
fn unknown_material_rejected() {
    let found = issues(&SMALL.replace("\"BBO_e\"", "\"KDP_e\""));
    assert!(found.iter().any(|i| i.path == "crystal.extraordinary" && i.message.contains("KDP_e")));
    let err = Error::Config(found);
    assert!(err.is_validation());
}

#[test]
fn syntax_error_reported() {
    let found = issues("name = \n");
    assert_eq!(found[0].path, "<syntax>");
}

#[test]
fn hash_follows_content() {
    let a = small();
    let b = validate_config(&SMALL.replace("9.0]", "9.5]"), &table()).unwrap();
    assert_eq!(a.hash().len(), 64);
    assert_ne!(a.hash(), b.hash());
    assert_eq!(a.hash(), small().hash());
}

#[test]
fn report_is_deterministic() {
    let cfg = small();
    let a = report_json(&run_scenario(&cfg, &table()).unwrap()).unwrap();
    let b = report_json(&run_scenario(&cfg, &table()).unwrap()).unwrap();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["scenario_hash"], cfg.hash());
    assert_eq!(v["library_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["material_table_version"], table().version.as_str());
    assert_eq!(v["results"].as_array().unwrap().len(), 3);
}

#[test]
fn widths_narrow_with_gain() {
    let res = run_scenario(&small(), &table()).unwrap();
    let w: Vec<f64> = res.report.results.iter().map(|r| r.envelope_fwhm.unwrap().nm).collect();
    let k: Vec<f64> = res.report.results.iter().map(|r| r.schmidt_number).collect();
    assert!(w.windows(2).all(|p| p[1] <= p[0]), "{w:?}");
    assert!(k.windows(2).all(|p| p[1] <= p[0]), "{k:?}");
    assert!(res.report.degenerate);
    assert!(res.report.results.iter().all(|r| r.g2.is_some()));
}

#[test]
fn collapsed_interferometer_matches_direct_build() {
    let text = format!("{SMALL}{SMALL_INTERFEROMETER}").replace("gvd_length_cm = 0.5", "gvd_length_cm = 0.0");
    let cfg = validate_config(&text, &table()).unwrap();
    let res = run_scenario(&cfg, &table()).unwrap();
    let setup = prepare(&cfg, &table()).unwrap();
    let direct = build_tpa(&setup).unwrap();
    for j in (0..256).step_by(17) {
        for k in (0..256).step_by(13) {
            assert_eq!(res.tpa.get(j, k), direct.get(j, k));
        }
    }
    assert!(res.report.pump_path_cm.is_some());
}

#[test]
fn narrow_grid_refused() {
    let text = SMALL.replace("half_span_rad_per_fs = 0.3", "half_span_rad_per_fs = 0.02");
    let cfg = validate_config(&text, &table()).unwrap();
    assert!(matches!(run_scenario(&cfg, &table()), Err(Error::InvalidGrid(_))));
}

#[test]
fn sweep_keeps_value_order() {
    let spec = SweepSpec {
        param: "gain".into(),
        values: vec![5.0, 1.0, 3.0],
        jobs: 3,
        hold_derived: false,
    };
    let rows = run_sweep(&small(), &spec, &table()).unwrap();
    let vals: Vec<f64> = rows.iter().map(|r| r.value).collect();
    assert_eq!(vals, vec![5.0, 1.0, 3.0]);
    assert!(rows.iter().all(|r| r.gain == Some(r.value)));
    assert!(rows[1].schmidt_number > rows[2].schmidt_number);
}

#[test]
fn sweep_records_point_failures() {
    let spec = SweepSpec {
        param: "grid.half_span_rad_per_fs".into(),
        values: vec![0.3, 0.01, -1.0],
        jobs: 1,
        hold_derived: false,
    };
    let rows = run_sweep(&small(), &spec, &table()).unwrap();
    assert_eq!(rows.len(), 3 + 2);
    assert!(rows[..3].iter().all(|r| r.error.is_none()));
    assert!(rows[3].error.as_deref().unwrap().contains("grid"));
    assert!(rows[4].error.as_deref().unwrap().contains("half_span"));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("sweep.csv");
    write_sweep_csv(&p, &rows).unwrap();
    let text = std::fs::read_to_string(p).unwrap();
    assert!(text.starts_with("value,gain,K,g2,fwhm_nm,nrf,error\n"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn unresolvable_sweep_param() {
    let spec = SweepSpec {
        param: "geometry.mirror".into(),
        values: vec![1.0],
        jobs: 1,
        hold_derived: false,
    };
    let err = run_sweep(&small(), &spec, &table()).unwrap_err();
    assert!(err.is_validation());
}

#[test]
fn held_derived_quantities() {
    let cfg = validate_config(&format!("{SMALL}{SMALL_INTERFEROMETER}"), &table()).unwrap();
    let setup = prepare(&cfg, &table()).unwrap();
    let frozen = freeze_derived(&cfg, "interferometer.gvd_length_cm", &table()).unwrap();
    let i = frozen.interferometer.as_ref().unwrap();
    let s = setup.interferometer.as_ref().unwrap();
    assert_eq!(i.pump_path_cm, Some(s.geometry.pump_path_cm));
    assert!(!frozen.lock.enabled);
    assert_eq!(frozen.lock.phase_offset_rad, s.phase_offset);
    let moved = apply_param(&frozen, "geometry.gvd_length", 0.6, &table()).unwrap();
    let ms = prepare(&moved, &table()).unwrap();
    assert_eq!(ms.interferometer.unwrap().geometry.pump_path_cm, s.geometry.pump_path_cm);
}

#[test]
fn outputs_written() {
    let mut cfg = small();
    cfg.outputs.export_modes = 2;
    cfg.outputs.dump_tpa = true;
    let res = run_scenario(&cfg, &table()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_outputs(&res, dir.path()).unwrap();
    for f in ["report.json", "spectrum.csv", "spectra/G_1.csv", "spectra/G_4.csv", "modes/mode_1.csv", "modes/manifest.json", "tpa.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let spectrum = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(spectrum.starts_with("omega_rad_per_fs,wavelength_nm,intensity\n"));
    assert_eq!(spectrum.lines().count(), 257);
}

#[test]
fn analytic_period_scaling() {
    let t = table();
    let vac = analytic_period(t.get("vacuum").unwrap(), 400.0).unwrap();
    assert!((vac - 0.4).abs() < 1e-12);
    let doubled = MaterialTable::from_json(
        r#"{"version": "t", "materials": [{"name": "two", "formula_variant": "constant",
            "coefficients": ["2.0"], "valid_range_um": ["0.2", "3.0"], "source": "-"}]}"#,
    )
    .unwrap();
    let p = analytic_period(doubled.get("two").unwrap(), 400.0).unwrap();
    assert!((p - 0.2).abs() < 1e-12);
}

fn bsv() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bsv"))
}

#[test]
fn cli_period() {
    let out = bsv().args(["period", "SF6", "400"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "0.224163 um");
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, SMALL.replace("\"BBO_o\"", "\"nope\"")).unwrap();
    assert_eq!(bsv().arg("validate").arg(&bad).output().unwrap().status.code(), Some(1));
    assert_eq!(bsv().arg("frobnicate").output().unwrap().status.code(), Some(1));
    let good = dir.path().join("good.toml");
    std::fs::write(&good, SMALL).unwrap();
    assert_eq!(bsv().arg("validate").arg(&good).output().unwrap().status.code(), Some(0));
    let missing = dir.path().join("absent.toml");
    assert_eq!(bsv().arg("run").arg(&missing).output().unwrap().status.code(), Some(2));
}

#[test]
fn cli_run_and_sweep_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let out = dir.path().join("out");
    let run = bsv().arg("run").arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8(run.stdout).unwrap().contains("G=1 K="));
    assert!(out.join("report.json").exists());
    let sweep = bsv()
        .args(["sweep"])
        .arg(&cfg)
        .args(["--param", "gain", "--values", "linspace:1:3:3", "--jobs", "2", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(sweep.status.success());
    let text = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);
    let no_param = bsv().arg("sweep").arg(&cfg).output().unwrap().status;
    assert_eq!(no_param.code(), Some(2));
}
