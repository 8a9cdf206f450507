use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{nm_from_omega, C_MM_PER_FS};

const BUILTIN_TABLE: &str = include_str!("../../data/materials.json");

/// Relative finite-difference step for first derivatives in frequency.
pub const DEFAULT_REL_STEP: f64 = 1e-6;
/// Relative step for second derivatives. A 1e-6 step would leave rounding
/// noise of order eps*k/h^2 (hundreds of fs^2/mm), so k'' uses a wider stencil.
pub const GVD_REL_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    /// n = c0
    Constant,
    /// n^2 = 1 + sum B_i l^2 / (l^2 - C_i), coefficients as (B_i, C_i) pairs
    Sellmeier,
    /// n^2 = A + B / (l^2 - C) - D l^2
    PoleIr,
    /// n - 1 = sum B_i / (C_i - 1/l^2), coefficients as (B_i, C_i) pairs
    Gas,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: String,
    pub formula: Formula,
    pub coefficients: Vec<f64>,
    /// Valid wavelength interval in um.
    pub valid_range_um: (f64, f64),
    pub source: String,
}

#[derive(Deserialize)]
struct RawMaterial {
    name: String,
    formula_variant: Formula,
    coefficients: Vec<String>,
    valid_range_um: [String; 2],
    source: String,
}

#[derive(Deserialize)]
struct RawTable {
    version: String,
    materials: Vec<RawMaterial>,
}

fn parse_decimal(material: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::MaterialTable(format!("{material}: bad coefficient `{s}`")))
}

impl Material {
    fn from_raw(raw: RawMaterial) -> Result<Self> {
        let coefficients = raw
            .coefficients
            .iter()
            .map(|c| parse_decimal(&raw.name, c))
            .collect::<Result<Vec<_>>>()?;
        let lo = parse_decimal(&raw.name, &raw.valid_range_um[0])?;
        let hi = parse_decimal(&raw.name, &raw.valid_range_um[1])?;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::MaterialTable(format!(
                "{}: invalid range [{lo}, {hi}] um",
                raw.name
            )));
        }
        let expected = match raw.formula_variant {
            Formula::Constant => coefficients.len() == 1,
            Formula::Sellmeier | Formula::Gas => {
                !coefficients.is_empty() && coefficients.len() % 2 == 0
            }
            Formula::PoleIr => coefficients.len() == 4,
        };
        if !expected {
            return Err(Error::MaterialTable(format!(
                "{}: wrong number of coefficients ({}) for {:?}",
                raw.name,
                coefficients.len(),
                raw.formula_variant
            )));
        }
        Ok(Material {
            name: raw.name,
            formula: raw.formula_variant,
            coefficients,
            valid_range_um: (lo, hi),
            source: raw.source,
        })
    }

    /// Refractive index at a wavelength in um.
    pub fn index_um(&self, l: f64) -> Result<f64> {
        let (lo, hi) = self.valid_range_um;
        if !(l >= lo && l <= hi) {
            return Err(Error::OutOfRange {
                material: self.name.clone(),
                wavelength_um: l,
                min_um: lo,
                max_um: hi,
            });
        }
        let c = &self.coefficients;
        let l2 = l * l;
        let n = match self.formula {
            Formula::Constant => c[0],
            Formula::Sellmeier => {
                let s: f64 = c.chunks(2).map(|p| p[0] * l2 / (l2 - p[1])).sum();
                (1.0 + s).sqrt()
            }
            Formula::PoleIr => (c[0] + c[1] / (l2 - c[2]) - c[3] * l2).sqrt(),
            Formula::Gas => {
                let s2 = 1.0 / l2;
                1.0 + c.chunks(2).map(|p| p[0] / (p[1] - s2)).sum::<f64>()
            }
        };
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Numerical(format!(
                "{}: non-physical index {n} at {l} um",
                self.name
            )));
        }
        Ok(n)
    }
}

/// Versioned collection of materials.
#[derive(Debug, Clone)]
pub struct MaterialTable {
    pub version: String,
    materials: Vec<Material>,
}

impl MaterialTable {
    /// The table shipped with the library.
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN_TABLE).expect("embedded material table is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawTable =
            serde_json::from_str(text).map_err(|e| Error::MaterialTable(e.to_string()))?;
        let materials = raw
            .materials
            .into_iter()
            .map(Material::from_raw)
            .collect::<Result<Vec<_>>>()?;
        for (i, m) in materials.iter().enumerate() {
            if materials[..i].iter().any(|o| o.name == m.name) {
                return Err(Error::MaterialTable(format!("duplicate material {}", m.name)));
            }
        }
        Ok(Self {
            version: raw.version,
            materials,
        })
    }

    pub fn get(&self, name: &str) -> Result<&Material> {
        self.materials
            .iter()
            .find(|m| m.name == name)
            .ok_or_else(|| Error::UnknownMaterial(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.materials.iter().any(|m| m.name == name)
    }

    pub fn materials(&self) -> &[Material] {
        &self.materials
    }
}

/// n(lambda), wavelength in nm.
pub fn refractive_index(material: &Material, wavelength_nm: f64) -> Result<f64> {
    material.index_um(wavelength_nm * 1e-3)
}

/// k = n(omega) omega / c in rad/mm.
pub fn wavevector(material: &Material, omega: f64) -> Result<f64> {
    let n = refractive_index(material, nm_from_omega(omega))?;
    Ok(n * omega / C_MM_PER_FS)
}

/// dk/domega in fs/mm by central difference with step `rel_step * omega`.
pub fn inverse_group_velocity(material: &Material, omega: f64, rel_step: f64) -> Result<f64> {
    let h = rel_step * omega;
    let kp = wavevector(material, omega + h)?;
    let km = wavevector(material, omega - h)?;
    Ok((kp - km) / (2.0 * h))
}

/// Group velocity (dk/domega)^-1 in mm/fs, step `DEFAULT_REL_STEP`.
pub fn group_velocity(material: &Material, omega: f64) -> Result<f64> {
    group_velocity_with_step(material, omega, DEFAULT_REL_STEP)
}

pub fn group_velocity_with_step(material: &Material, omega: f64, rel_step: f64) -> Result<f64> {
    Ok(1.0 / inverse_group_velocity(material, omega, rel_step)?)
}

/// Group-velocity dispersion k'' in fs^2/mm.
pub fn gvd(material: &Material, omega: f64) -> Result<f64> {
    let h = GVD_REL_STEP * omega;
    let kp = wavevector(material, omega + h)?;
    let k0 = wavevector(material, omega)?;
    let km = wavevector(material, omega - h)?;
    Ok((kp - 2.0 * k0 + km) / (h * h))
}
