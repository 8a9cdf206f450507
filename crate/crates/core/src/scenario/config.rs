use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;

use crate::dispersion::{Extremum, MaterialTable};
use crate::schmidt::GainReference;

/// One problem found while validating a scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    pub wavelength_nm: f64,
    /// Intensity FWHM of the pulse.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fwhm_fs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_fs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSection {
    pub ordinary: String,
    pub extraordinary: String,
    pub length_mm: f64,
}

fn default_air() -> String {
    "air".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferometerSection {
    pub gvd_material: String,
    pub gvd_length_cm: f64,
    #[serde(default)]
    pub air_gap_cm: f64,
    #[serde(default = "default_air")]
    pub air_material: String,
    /// Solved from the extremum condition at the lock wavelength when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump_path_cm: Option<f64>,
    #[serde(default)]
    pub extremum: Extremum,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LockSection {
    /// Lock the total phase to zero at the lock wavelength.
    #[serde(default = "yes")]
    pub enabled: bool,
    /// Defaults to the degenerate wavelength.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength_nm: Option<f64>,
    /// Extra phase added after locking (or instead of it when disabled), rad.
    #[serde(default)]
    pub phase_offset_rad: f64,
}

impl Default for LockSection {
    fn default() -> Self {
        Self {
            enabled: true,
            wavelength_nm: None,
            phase_offset_rad: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainSection {
    pub values: Vec<f64>,
    #[serde(default)]
    pub reference: GainReference,
}

fn default_min_points() -> usize {
    64
}
fn default_edge() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_span_rad_per_fs: Option<f64>,
    #[serde(default = "default_min_points")]
    pub min_points: usize,
    /// Largest allowed edge-to-peak ratio of the marginal.
    #[serde(default = "default_edge")]
    pub max_edge_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchmidtSection {
    #[serde(default = "SchmidtSection::default_cumulative")]
    pub cumulative_tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rank: Option<usize>,
    #[serde(default = "SchmidtSection::default_degeneracy")]
    pub degeneracy_tolerance: f64,
    #[serde(default = "SchmidtSection::default_pair")]
    pub pair_tolerance: f64,
}

impl SchmidtSection {
    fn default_cumulative() -> f64 {
        1e-8
    }
    fn default_degeneracy() -> f64 {
        1e-10
    }
    fn default_pair() -> f64 {
        1e-3
    }
}

impl Default for SchmidtSection {
    fn default() -> Self {
        Self {
            cumulative_tolerance: Self::default_cumulative(),
            max_rank: None,
            degeneracy_tolerance: Self::default_degeneracy(),
            pair_tolerance: Self::default_pair(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservablesSection {
    #[serde(default = "ObservablesSection::default_threshold")]
    pub peak_threshold: f64,
    #[serde(default = "ObservablesSection::default_gap")]
    pub peak_merge_gap_rad_per_fs: f64,
}

impl ObservablesSection {
    fn default_threshold() -> f64 {
        0.1
    }
    fn default_gap() -> f64 {
        0.03
    }
}

impl Default for ObservablesSection {
    fn default() -> Self {
        Self {
            peak_threshold: Self::default_threshold(),
            peak_merge_gap_rad_per_fs: Self::default_gap(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSection {
    pub name: String,
    pub lower_nm: f64,
    pub upper_nm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NrfSplit {
    #[default]
    None,
    /// Split the axis at omega_p / 2.
    Degenerate,
    /// Split at the spectral minimum between the two strongest peaks.
    InterPeakMinimum,
    /// Use the first two entries of `bands`.
    Bands,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NrfSection {
    #[serde(default)]
    pub split: NrfSplit,
}

fn default_modes() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default = "default_modes")]
    pub export_modes: usize,
    #[serde(default)]
    pub dump_tpa: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: None,
            export_modes: default_modes(),
            dump_tpa: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValues {
    List(Vec<f64>),
    /// `linspace:start:stop:count` or comma-separated numbers.
    Spec(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub param: String,
    pub values: SweepValues,
    /// Solve pump path and lock phase once at the base point and keep them.
    #[serde(default)]
    pub hold_derived: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

/// Full experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub pump: PumpSection,
    pub crystal: CrystalSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interferometer: Option<InterferometerSection>,
    #[serde(default)]
    pub lock: LockSection,
    pub gain: GainSection,
    pub grid: GridSection,
    #[serde(default)]
    pub schmidt: SchmidtSection,
    #[serde(default)]
    pub observables: ObservablesSection,
    #[serde(default)]
    pub nrf: NrfSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bands: Vec<BandSection>,
    #[serde(default)]
    pub outputs: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

impl ScenarioConfig {
    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes");
        format!("{:x}", Sha256::digest(canon.as_bytes()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Str,
    Num,
    Int,
    Bool,
    NumList,
    NumListOrStr,
    Table,
    TableList,
}

#[derive(Clone, Copy)]
enum Range {
    Any,
    Positive,
    NonNegative,
    Fraction,
    AtLeastOne,
}

struct Field {
    path: &'static str,
    kind: Kind,
    required: bool,
    unit: &'static str,
    range: Range,
    choices: &'static [&'static str],
}

const fn f(path: &'static str, kind: Kind, required: bool, unit: &'static str, range: Range) -> Field {
    Field {
        path,
        kind,
        required,
        unit,
        range,
        choices: &[],
    }
}

const fn choice(path: &'static str, choices: &'static [&'static str]) -> Field {
    Field {
        path,
        kind: Kind::Str,
        required: false,
        unit: "",
        range: Range::Any,
        choices,
    }
}

use Kind::*;
use Range::*;

/// Every accepted key. Paths of sections marked optional are only required
/// when the section is present.
const SCHEMA: &[Field] = &[
    f("name", Str, true, "", Any),
    f("description", Str, false, "", Any),
    f("pump", Table, true, "", Any),
    f("pump.wavelength_nm", Num, true, "nm", Positive),
    f("pump.fwhm_fs", Num, false, "fs", Positive),
    f("pump.tau_fs", Num, false, "fs", Positive),
    f("crystal", Table, true, "", Any),
    f("crystal.ordinary", Str, true, "", Any),
    f("crystal.extraordinary", Str, true, "", Any),
    f("crystal.length_mm", Num, true, "mm", Positive),
    f("interferometer", Table, false, "", Any),
    f("interferometer.gvd_material", Str, true, "", Any),
    f("interferometer.gvd_length_cm", Num, true, "cm", NonNegative),
    f("interferometer.air_gap_cm", Num, false, "cm", NonNegative),
    f("interferometer.air_material", Str, false, "", Any),
    f("interferometer.pump_path_cm", Num, false, "cm", NonNegative),
    choice("interferometer.extremum", &["phase", "total"]),
    f("lock", Table, false, "", Any),
    f("lock.enabled", Bool, false, "", Any),
    f("lock.wavelength_nm", Num, false, "nm", Positive),
    f("lock.phase_offset_rad", Num, false, "rad", Any),
    f("gain", Table, true, "", Any),
    f("gain.values", NumList, true, "", NonNegative),
    choice("gain.reference", &["unit-trace", "leading-mode"]),
    f("grid", Table, true, "", Any),
    f("grid.points", Int, true, "", AtLeastOne),
    f("grid.half_span_rad_per_fs", Num, false, "rad/fs", Positive),
    f("grid.min_points", Int, false, "", AtLeastOne),
    f("grid.max_edge_ratio", Num, false, "", Positive),
    f("schmidt", Table, false, "", Any),
    f("schmidt.cumulative_tolerance", Num, false, "", Fraction),
    f("schmidt.max_rank", Int, false, "", AtLeastOne),
    f("schmidt.degeneracy_tolerance", Num, false, "", NonNegative),
    f("schmidt.pair_tolerance", Num, false, "", NonNegative),
    f("observables", Table, false, "", Any),
    f("observables.peak_threshold", Num, false, "", Fraction),
    f("observables.peak_merge_gap_rad_per_fs", Num, false, "rad/fs", Positive),
    f("nrf", Table, false, "", Any),
    choice("nrf.split", &["none", "degenerate", "inter-peak-minimum", "bands"]),
    f("bands", TableList, false, "", Any),
    f("outputs", Table, false, "", Any),
    f("outputs.dir", Str, false, "", Any),
    f("outputs.export_modes", Int, false, "", NonNegative),
    f("outputs.dump_tpa", Bool, false, "", Any),
    f("sweep", Table, false, "", Any),
    f("sweep.param", Str, true, "", Any),
    f("sweep.values", NumListOrStr, true, "", Any),
    f("sweep.hold_derived", Bool, false, "", Any),
    f("sweep.jobs", Int, false, "", AtLeastOne),
];

const BAND_FIELDS: &[Field] = &[
    f("name", Str, true, "", Any),
    f("lower_nm", Num, true, "nm", Positive),
    f("upper_nm", Num, true, "nm", Positive),
];

/// Numeric keys a sweep may vary.
pub fn sweepable_paths() -> impl Iterator<Item = &'static str> {
    SCHEMA
        .iter()
        .filter(|f| matches!(f.kind, Num | Int))
        .map(|f| f.path)
        .chain(std::iter::once("gain"))
}

fn lookup<'a>(root: &'a toml::Value, path: &str) -> Option<&'a toml::Value> {
    path.split('.').try_fold(root, |v, k| v.get(k))
}

fn as_num(v: &toml::Value) -> Option<f64> {
    match v {
        toml::Value::Float(x) => Some(*x),
        toml::Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn check_value(path: &str, field: &Field, v: &toml::Value, issues: &mut Vec<ConfigIssue>) {
    let unit = if field.unit.is_empty() {
        String::new()
    } else {
        format!(" ({})", field.unit)
    };
    let mut push = |m: String| {
        issues.push(ConfigIssue {
            path: path.to_string(),
            message: m,
        })
    };
    let range_ok = |x: f64| match field.range {
        Any => x.is_finite(),
        Positive => x > 0.0 && x.is_finite(),
        NonNegative => x >= 0.0 && x.is_finite(),
        Fraction => (0.0..1.0).contains(&x),
        AtLeastOne => x >= 1.0,
    };
    let range_text = match field.range {
        Any => "a finite number",
        Positive => "> 0",
        NonNegative => ">= 0",
        Fraction => "in [0, 1)",
        AtLeastOne => ">= 1",
    };
    match field.kind {
        Str => match v.as_str() {
            None => push("expected a string".into()),
            Some(s) if !field.choices.is_empty() && !field.choices.contains(&s) => {
                push(format!("`{s}` is not one of {}", field.choices.join(", ")))
            }
            _ => {}
        },
        Bool => {
            if v.as_bool().is_none() {
                push("expected true or false".into())
            }
        }
        Num => match as_num(v) {
            None => push(format!("expected a number{unit}")),
            Some(x) if !range_ok(x) => push(format!("{x}{unit} out of range: must be {range_text}")),
            _ => {}
        },
        Int => match v.as_integer() {
            None => push("expected an integer".into()),
            Some(i) if !range_ok(i as f64) => push(format!("{i} out of range: must be {range_text}")),
            _ => {}
        },
        NumList | NumListOrStr => {
            if field.kind == NumListOrStr && v.is_str() {
                return;
            }
            match v.as_array() {
                None => push(format!("expected a list of numbers{unit}")),
                Some(a) if a.is_empty() => push("list is empty".into()),
                Some(a) => {
                    for (i, x) in a.iter().enumerate() {
                        match as_num(x) {
                            None => push(format!("entry {i} is not a number")),
                            Some(x) if !range_ok(x) => {
                                push(format!("entry {i} = {x}{unit} out of range: must be {range_text}"))
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        Table => {
            if !v.is_table() {
                push("expected a table".into())
            }
        }
        TableList => {
            if !v.as_array().is_some_and(|a| a.iter().all(|t| t.is_table())) {
                push("expected an array of tables".into())
            }
        }
    }
}

fn check_unknown(prefix: &str, table: &toml::value::Table, allowed: &[&str], issues: &mut Vec<ConfigIssue>) {
    for key in table.keys() {
        let path = if prefix.is_empty() {
            key.clone()
        } else {
            format!("{prefix}.{key}")
        };
        if !allowed.contains(&path.as_str()) {
            issues.push(ConfigIssue {
                path,
                message: "unknown field".into(),
            });
        }
    }
}

fn structural(root: &toml::Value, issues: &mut Vec<ConfigIssue>) {
    let paths: Vec<&str> = SCHEMA.iter().map(|f| f.path).collect();
    if let Some(t) = root.as_table() {
        check_unknown("", t, &paths, issues);
        for (k, v) in t {
            if let (Some(sub), true) = (v.as_table(), paths.contains(&k.as_str())) {
                check_unknown(k, sub, &paths, issues);
            }
        }
    }
    for field in SCHEMA {
        let parent_present = match field.path.rsplit_once('.') {
            None => true,
            Some((parent, _)) => lookup(root, parent).is_some_and(|p| p.is_table()),
        };
        match lookup(root, field.path) {
            Some(v) => check_value(field.path, field, v, issues),
            None if field.required && parent_present => issues.push(ConfigIssue {
                path: field.path.to_string(),
                message: if field.unit.is_empty() {
                    "missing required field".into()
                } else {
                    format!("missing required field ({})", field.unit)
                },
            }),
            None => {}
        }
    }
    if let Some(bands) = root.get("bands").and_then(|b| b.as_array()) {
        let names: Vec<&str> = BAND_FIELDS.iter().map(|f| f.path).collect();
        for (i, b) in bands.iter().enumerate() {
            let Some(t) = b.as_table() else { continue };
            let prefix = format!("bands[{i}]");
            for key in t.keys() {
                if !names.contains(&key.as_str()) {
                    issues.push(ConfigIssue {
                        path: format!("{prefix}.{key}"),
                        message: "unknown field".into(),
                    });
                }
            }
            for field in BAND_FIELDS {
                let path = format!("{prefix}.{}", field.path);
                match t.get(field.path) {
                    Some(v) => check_value(&path, field, v, issues),
                    None => issues.push(ConfigIssue {
                        path,
                        message: "missing required field".into(),
                    }),
                }
            }
        }
    }
}

fn semantic(cfg: &ScenarioConfig, table: &MaterialTable, issues: &mut Vec<ConfigIssue>) {
    let mut push = |p: &str, m: String| {
        issues.push(ConfigIssue {
            path: p.into(),
            message: m,
        })
    };
    match (cfg.pump.fwhm_fs, cfg.pump.tau_fs) {
        (Some(_), Some(_)) => push("pump", "give either fwhm_fs or tau_fs, not both".into()),
        (None, None) => push("pump.fwhm_fs", "missing pulse duration: set fwhm_fs or tau_fs (fs)".into()),
        _ => {}
    }
    let mut material = |path: &str, name: &str| {
        if !table.contains(name) {
            push(path, format!("unknown material `{name}` (table version {})", table.version));
        }
    };
    material("crystal.ordinary", &cfg.crystal.ordinary);
    material("crystal.extraordinary", &cfg.crystal.extraordinary);
    if let Some(i) = &cfg.interferometer {
        material("interferometer.gvd_material", &i.gvd_material);
        material("interferometer.air_material", &i.air_material);
    }
    let mut push = |p: &str, m: String| {
        issues.push(ConfigIssue {
            path: p.into(),
            message: m,
        })
    };
    if cfg.grid.points < cfg.grid.min_points {
        push(
            "grid.points",
            format!("{} points is below the minimum of {}", cfg.grid.points, cfg.grid.min_points),
        );
    }
    if let Some(w) = cfg.lock.wavelength_nm {
        if w <= cfg.pump.wavelength_nm {
            push(
                "lock.wavelength_nm",
                format!("{w} nm must be longer than the pump wavelength {} nm", cfg.pump.wavelength_nm),
            );
        }
    }
    for (i, b) in cfg.bands.iter().enumerate() {
        if b.lower_nm >= b.upper_nm {
            push(&format!("bands[{i}]"), format!("lower_nm {} must be < upper_nm {}", b.lower_nm, b.upper_nm));
        }
    }
    if cfg.nrf.split == NrfSplit::Bands && cfg.bands.len() < 2 {
        push("nrf.split", "`bands` needs at least two [[bands]] entries".into());
    }
}

/// Parse and validate scenario text. Returns every problem found.
pub fn validate_config(text: &str, table: &MaterialTable) -> Result<ScenarioConfig, Vec<ConfigIssue>> {
    let root: toml::Value = match text.parse::<toml::Table>() {
        Ok(t) => toml::Value::Table(t),
        Err(e) => {
            return Err(vec![ConfigIssue {
                path: "<syntax>".into(),
                message: e.message().to_string(),
            }])
        }
    };
    validate_value(&root, table)
}

pub fn validate_value(root: &toml::Value, table: &MaterialTable) -> Result<ScenarioConfig, Vec<ConfigIssue>> {
    let mut issues = Vec::new();
    structural(root, &mut issues);
    if !issues.is_empty() {
        return Err(issues);
    }
    let cfg: ScenarioConfig = match root.clone().try_into() {
        Ok(c) => c,
        Err(e) => {
            return Err(vec![ConfigIssue {
                path: "<schema>".into(),
                message: e.to_string(),
            }])
        }
    };
    semantic(&cfg, table, &mut issues);
    if issues.is_empty() {
        Ok(cfg)
    } else {
        Err(issues)
    }
}
