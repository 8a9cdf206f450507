use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the gain G maps onto per-mode squeezing parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GainReference {
    /// r_n = G sqrt(lambda_n) with sum lambda = 1.
    #[default]
    UnitTrace,
    /// r_n = G sqrt(lambda_n / lambda_0): G is the squeezing of the strongest mode.
    LeadingMode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainState {
    pub gain: f64,
    pub reference: GainReference,
    /// Squeezing parameters r_n.
    pub r: Vec<f64>,
    /// Redistributed weights Lambda_n.
    pub weights: Vec<f64>,
    /// sinh^2 r_n
    pub mean_photons: Vec<f64>,
    #[serde(skip)]
    fingerprint: u64,
}

/// FNV-1a over the bit patterns, to tie a GainState to its eigenvalues.
pub(crate) fn fingerprint(lambdas: &[f64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for l in lambdas {
        for b in l.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

impl GainState {
    pub fn matches(&self, lambdas: &[f64]) -> bool {
        self.r.len() == lambdas.len() && self.fingerprint == fingerprint(lambdas)
    }

    pub fn schmidt_number(&self) -> f64 {
        schmidt_number(&self.weights)
    }

    pub fn total_photons(&self) -> f64 {
        self.mean_photons.iter().sum()
    }
}

/// Gain redistribution with r_n = G sqrt(lambda_n).
pub fn redistribute(lambdas: &[f64], gain: f64) -> Result<GainState> {
    redistribute_with(lambdas, gain, GainReference::UnitTrace)
}

pub fn redistribute_with(lambdas: &[f64], gain: f64, reference: GainReference) -> Result<GainState> {
    if !(gain >= 0.0 && gain.is_finite()) {
        return Err(Error::Precondition(format!("gain G = {gain} must be >= 0")));
    }
    if lambdas.is_empty() || lambdas.iter().any(|l| !(*l >= 0.0)) {
        return Err(Error::Precondition("eigenvalues must be non-empty and >= 0".into()));
    }
    let lead = lambdas.iter().cloned().fold(0.0, f64::max);
    if lead <= 0.0 {
        return Err(Error::Precondition("all eigenvalues are zero".into()));
    }
    let scale = match reference {
        GainReference::UnitTrace => gain,
        GainReference::LeadingMode => gain / lead.sqrt(),
    };
    let r: Vec<f64> = lambdas.iter().map(|l| scale * l.sqrt()).collect();
    let rmax = r.iter().cloned().fold(0.0, f64::max);

    let raw: Vec<f64> = if rmax == 0.0 {
        // G -> 0: sinh r ~ r, so Lambda_n -> lambda_n
        lambdas.to_vec()
    } else if rmax < 20.0 {
        r.iter().map(|x| x.sinh().powi(2)).collect()
    } else {
        // (sinh r / sinh rmax)^2 without overflow
        let tail = 1.0 - (-2.0 * rmax).exp();
        r.iter()
            .map(|&x| ((x - rmax).exp() * (1.0 - (-2.0 * x).exp()) / tail).powi(2))
            .collect()
    };
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();
    Ok(GainState {
        gain,
        reference,
        mean_photons: r.iter().map(|x| x.sinh().powi(2)).collect(),
        r,
        weights,
        fingerprint: fingerprint(lambdas),
    })
}

/// K = 1 / sum w^2 for normalized weights.
pub fn schmidt_number(weights: &[f64]) -> f64 {
    1.0 / weights.iter().map(|w| w * w).sum::<f64>()
}
