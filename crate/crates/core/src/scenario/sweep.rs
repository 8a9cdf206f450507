use serde::Serialize;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::dispersion::MaterialTable;
use crate::error::{Error, Result};
use crate::scenario::config::{sweepable_paths, validate_value, ConfigIssue, ScenarioConfig, SweepValues};
use crate::scenario::pipeline::{prepare, run_scenario};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: String,
    pub values: Vec<f64>,
    /// Worker cap.
    pub jobs: usize,
    /// Keep the base point's solved pump path and lock phase fixed.
    pub hold_derived: bool,
}

impl SweepSpec {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Option<Self>> {
        let Some(s) = &cfg.sweep else { return Ok(None) };
        let values = match &s.values {
            SweepValues::List(v) => v.clone(),
            SweepValues::Spec(t) => parse_values(t)?,
        };
        Ok(Some(Self {
            param: s.param.clone(),
            values,
            jobs: s.jobs.unwrap_or_else(default_jobs),
            hold_derived: s.hold_derived,
        }))
    }
}

pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn sweep_error(m: String) -> Error {
    Error::Config(vec![ConfigIssue {
        path: "sweep.values".into(),
        message: m,
    }])
}

/// `a,b,c` or `linspace:start:stop:count`.
pub fn parse_values(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    let values: Vec<f64> = if let Some(rest) = spec.strip_prefix("linspace:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(sweep_error(format!("`{spec}`: expected linspace:start:stop:count")));
        }
        let a: f64 = parts[0].trim().parse().map_err(|_| sweep_error(format!("bad start `{}`", parts[0])))?;
        let b: f64 = parts[1].trim().parse().map_err(|_| sweep_error(format!("bad stop `{}`", parts[1])))?;
        let n: usize = parts[2].trim().parse().map_err(|_| sweep_error(format!("bad count `{}`", parts[2])))?;
        match n {
            0 => vec![],
            1 => vec![a],
            _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
        }
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| sweep_error(format!("bad value `{s}`"))))
            .collect::<Result<_>>()?
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(sweep_error(format!("`{spec}` gives no finite values")));
    }
    Ok(values)
}

/// Canonical config path for a sweep parameter.
pub fn resolve_param(param: &str) -> Result<String> {
    let canon = match param {
        "gain" | "G" => "gain",
        "geometry.gvd_length" | "geometry.gvd_length_cm" => "interferometer.gvd_length_cm",
        "geometry.air_gap" | "geometry.air_gap_cm" => "interferometer.air_gap_cm",
        "geometry.pump_path" | "geometry.pump_path_cm" => "interferometer.pump_path_cm",
        "geometry.crystal_length" | "geometry.crystal_length_mm" => "crystal.length_mm",
        other => other,
    };
    if sweepable_paths().any(|p| p == canon) {
        Ok(canon.to_string())
    } else {
        Err(Error::Config(vec![ConfigIssue {
            path: "sweep.param".into(),
            message: format!("`{param}` does not name a numeric scenario field"),
        }]))
    }
}

fn set_path(root: &mut toml::Value, path: &str, value: toml::Value) {
    let mut parts: Vec<&str> = path.split('.').collect();
    let last = parts.pop().unwrap();
    let mut cur = root;
    for p in parts {
        let t = cur.as_table_mut().expect("table");
        cur = t
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
    }
    cur.as_table_mut().expect("table").insert(last.to_string(), value);
}

/// Copy of `cfg` with one numeric field replaced, revalidated.
pub fn apply_param(cfg: &ScenarioConfig, param: &str, value: f64, table: &MaterialTable) -> Result<ScenarioConfig> {
    let path = resolve_param(param)?;
    let mut root = toml::Value::try_from(cfg).map_err(|e| Error::Inconsistent(e.to_string()))?;
    let integer = matches!(
        path.as_str(),
        "grid.points" | "grid.min_points" | "schmidt.max_rank" | "outputs.export_modes" | "sweep.jobs"
    );
    let v = if path == "gain" {
        set_path(&mut root, "gain.values", toml::Value::Array(vec![toml::Value::Float(value)]));
        None
    } else if integer {
        Some(toml::Value::Integer(value.round() as i64))
    } else {
        Some(toml::Value::Float(value))
    };
    if let Some(v) = v {
        set_path(&mut root, &path, v);
    }
    validate_value(&root, table).map_err(Error::Config)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub gain: Option<f64>,
    pub schmidt_number: Option<f64>,
    pub g2: Option<f64>,
    pub fwhm_nm: Option<f64>,
    pub nrf: Option<f64>,
    pub error: Option<String>,
}

/// Pin the pump path and lock phase of the base configuration.
pub fn freeze_derived(cfg: &ScenarioConfig, param: &str, table: &MaterialTable) -> Result<ScenarioConfig> {
    let mut out = cfg.clone();
    let setup = prepare(cfg, table)?;
    if let (Some(i), Some(s)) = (out.interferometer.as_mut(), setup.interferometer.as_ref()) {
        if param != "interferometer.pump_path_cm" {
            i.pump_path_cm = Some(s.geometry.pump_path_cm);
        }
        if !param.starts_with("lock.") {
            out.lock.enabled = false;
            out.lock.phase_offset_rad = s.phase_offset;
        }
    }
    Ok(out)
}

fn evaluate(cfg: &ScenarioConfig, param: &str, value: f64, table: &MaterialTable) -> Vec<SweepRow> {
    let failed = |e: Error| {
        vec![SweepRow {
            value,
            gain: None,
            schmidt_number: None,
            g2: None,
            fwhm_nm: None,
            nrf: None,
            error: Some(e.to_string().replace('\n', "; ")),
        }]
    };
    let point = match apply_param(cfg, param, value, table) {
        Ok(c) => c,
        Err(e) => return failed(e),
    };
    match run_scenario(&point, table) {
        Err(e) => failed(e),
        Ok(res) => res
            .report
            .results
            .iter()
            .map(|r| SweepRow {
                value,
                gain: Some(r.gain),
                schmidt_number: Some(r.schmidt_number),
                g2: r.g2,
                fwhm_nm: r.envelope_fwhm.map(|w| w.nm),
                nrf: r.nrf.as_ref().map(|n| n.value),
                error: None,
            })
            .collect(),
    }
}

/// One group of rows per sweep value (one row per configured gain), in the
/// order of `spec.values`. Point failures are recorded in the rows.
pub fn run_sweep(cfg: &ScenarioConfig, spec: &SweepSpec, table: &MaterialTable) -> Result<Vec<SweepRow>> {
    let param = resolve_param(&spec.param)?;
    let base = if spec.hold_derived {
        freeze_derived(cfg, &param, table)?
    } else {
        cfg.clone()
    };
    let n = spec.values.len();
    let slots: Vec<Mutex<Vec<SweepRow>>> = (0..n).map(|_| Mutex::new(Vec::new())).collect();
    let next = AtomicUsize::new(0);
    let workers = spec.jobs.clamp(1, n.max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let rows = evaluate(&base, &param, spec.values[i], table);
                *slots[i].lock().unwrap() = rows;
            });
        }
    });
    Ok(slots.into_iter().flat_map(|m| m.into_inner().unwrap()).collect())
}
