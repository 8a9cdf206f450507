use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsa::FrequencyGrid;
use crate::schmidt::{GainState, SchmidtDecomposition};
use crate::units::omega_from_nm;

/// Frequency band [lower, upper) in rad/fs. A grid point belongs to the band
/// when its frequency does.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBand {
    pub lower: f64,
    pub upper: f64,
}

impl SpectralBand {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::Precondition(format!(
                "band needs lower < upper, got [{lower}, {upper}) rad/fs"
            )));
        }
        Ok(Self { lower, upper })
    }

    /// Band between two wavelengths in nm, either order.
    pub fn from_nm(a: f64, b: f64) -> Result<Self> {
        let (x, y) = (omega_from_nm(a), omega_from_nm(b));
        Self::new(x.min(y), x.max(y))
    }

    /// The whole grid.
    pub fn full(grid: &FrequencyGrid) -> Self {
        Self {
            lower: grid.first() - 0.5 * grid.step,
            upper: grid.last() + 0.5 * grid.step,
        }
    }

    pub fn overlaps(&self, other: &SpectralBand) -> bool {
        self.lower < other.upper && other.lower < self.upper
    }

    /// 0/1 indicator on the grid.
    pub fn indicator(&self, grid: &FrequencyGrid) -> Result<Vec<f64>> {
        let tol = 1e-9 * grid.step;
        if self.lower < grid.first() - 0.5 * grid.step - tol || self.upper > grid.last() + 0.5 * grid.step + tol {
            return Err(Error::Precondition(format!(
                "band [{}, {}) rad/fs extends beyond the grid [{}, {}]",
                self.lower,
                self.upper,
                grid.first(),
                grid.last()
            )));
        }
        Ok((0..grid.len())
            .map(|j| {
                let w = grid.omega(j);
                if w >= self.lower && w < self.upper {
                    1.0
                } else {
                    0.0
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Per-mode statistics of a diagonal Gaussian state in the Schmidt basis.
#[derive(Debug, Clone, Copy)]
pub enum ModeState<'a> {
    /// Squeezed vacuum with parameters r_n (A_n = B_n).
    Squeezed(&'a GainState),
    /// Independent thermal modes with the given occupations, no anomalous terms.
    Thermal(&'a [f64]),
}

fn check(decomp: &SchmidtDecomposition, state: &ModeState) -> Result<()> {
    let ok = match state {
        ModeState::Squeezed(g) => g.matches(&decomp.lambdas),
        ModeState::Thermal(n) => n.len() == decomp.rank_kept,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Inconsistent("mode state does not belong to this decomposition".into()))
    }
}

/// Ut^dagger diag(d) Ut for an N x k matrix Ut.
fn weighted_gram(ut: &Mat<c64>, d: &[f64]) -> Mat<c64> {
    let du = Mat::from_fn(ut.nrows(), ut.ncols(), |j, n| ut[(j, n)] * d[j]);
    ut.adjoint() * &du
}

/// Vh diag(d) Vh^dagger for a k x N matrix Vh.
fn weighted_gram_rows(vh: &Mat<c64>, d: &[f64]) -> Mat<c64> {
    let dv = Mat::from_fn(vh.nrows(), vh.ncols(), |n, k| vh[(n, k)] * d[k]);
    &dv * vh.adjoint()
}

/// Means of N_a, N_b and Cov(N_a, N_b) for grid weights a, b, by Wick's
/// theorem in the Schmidt basis.
pub fn wick_moments(decomp: &SchmidtDecomposition, state: &ModeState, a: &[f64], b: &[f64]) -> Result<(f64, f64, f64)> {
    check(decomp, state)?;
    let ut = decomp.unitary_s();
    let k = decomp.rank_kept;
    let oa = weighted_gram(&ut, a);
    let ob = weighted_gram(&ut, b);
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    let oab = weighted_gram(&ut, &ab);
    let occ: Vec<f64> = match state {
        ModeState::Squeezed(g) => g.mean_photons.clone(),
        ModeState::Thermal(n) => n.to_vec(),
    };
    let mean_a: f64 = (0..k).map(|n| occ[n] * oa[(n, n)].re).sum();
    let mean_b: f64 = (0..k).map(|n| occ[n] * ob[(n, n)].re).sum();

    // normal part: sum sh_n sh_m OA_nm conj(OB_nm) + sum sh_n OAB_nn
    let mut cov = 0.0;
    for m in 0..k {
        for n in 0..k {
            cov += occ[n] * occ[m] * (oa[(n, m)] * ob[(n, m)].conj()).re;
        }
        cov += occ[m] * oab[(m, m)].re;
    }
    // anomalous part: sum sc_n sc_m OA_mn VB_nm
    if let ModeState::Squeezed(g) = state {
        let vh = decomp.unitary_i_rows();
        let vb = weighted_gram_rows(&vh, b);
        let sc: Vec<f64> = g.r.iter().map(|r| r.sinh() * r.cosh()).collect();
        for m in 0..k {
            for n in 0..k {
                cov += sc[n] * sc[m] * (oa[(m, n)] * vb[(n, m)]).re;
            }
        }
    }
    Ok((mean_a, mean_b, cov))
}

/// Mean and variance of the photon number in a band.
pub fn band_moments(decomp: &SchmidtDecomposition, gain: &GainState, band: &SpectralBand) -> Result<BandMoments> {
    band_moments_of(decomp, &ModeState::Squeezed(gain), band)
}

pub fn band_moments_of(decomp: &SchmidtDecomposition, state: &ModeState, band: &SpectralBand) -> Result<BandMoments> {
    let d = band.indicator(&decomp.grid)?;
    let (mean, _, variance) = wick_moments(decomp, state, &d, &d)?;
    Ok(BandMoments { mean, variance })
}

/// Cov(N_a, N_b) for two bands.
pub fn band_covariance(decomp: &SchmidtDecomposition, gain: &GainState, a: &SpectralBand, b: &SpectralBand) -> Result<f64> {
    let da = a.indicator(&decomp.grid)?;
    let db = b.indicator(&decomp.grid)?;
    Ok(wick_moments(decomp, &ModeState::Squeezed(gain), &da, &db)?.2)
}

/// Symmetrized pair-creation matrix of N_D = sum_j d_j a_j^dagger a_j for the
/// squeezed vacuum: N_D = const + a0^dagger X a0 + (a0^dagger T a0^dagger + h.c.).
/// Var(N_D) = 2 ||T||_F^2. Built from the output operators directly, so no
/// large terms cancel.
fn pair_matrix(decomp: &SchmidtDecomposition, gain: &GainState, d: &[f64]) -> Mat<c64> {
    let ut = decomp.unitary_s();
    let vh = decomp.unitary_i_rows();
    let o = weighted_gram(&ut, d);
    let k = decomp.rank_kept;
    // X = D Ut + Ut (C - I) O
    let cm1_o = Mat::from_fn(k, k, |n, m| o[(n, m)] * (gain.r[n].cosh() - 1.0));
    let mut x = &ut * &cm1_o;
    for n in 0..k {
        for j in 0..ut.nrows() {
            x[(j, n)] += ut[(j, n)] * d[j];
        }
    }
    let xs = Mat::from_fn(x.nrows(), k, |j, n| x[(j, n)] * gain.r[n].sinh());
    let t = &xs * &vh;
    Mat::from_fn(t.nrows(), t.ncols(), |j, l| (t[(j, l)] + t[(l, j)]) * 0.5)
}

fn frob2(m: &Mat<c64>) -> f64 {
    let mut s = 0.0;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            s += m[(r, c)].norm_sqr();
        }
    }
    s
}

/// Var(N_D) for grid weights d from the output operators.
pub fn weighted_variance(decomp: &SchmidtDecomposition, gain: &GainState, d: &[f64]) -> Result<f64> {
    check(decomp, &ModeState::Squeezed(gain))?;
    Ok(2.0 * frob2(&pair_matrix(decomp, gain, d)))
}

fn nrf_preconditions(decomp: &SchmidtDecomposition, band_s: &SpectralBand, band_i: &SpectralBand) -> Result<(Vec<f64>, Vec<f64>)> {
    if band_s.overlaps(band_i) {
        return Err(Error::Precondition("NRF bands overlap".into()));
    }
    Ok((band_s.indicator(&decomp.grid)?, band_i.indicator(&decomp.grid)?))
}

/// Var(N_s - N_i) / (<N_s> + <N_i>).
pub fn nrf(decomp: &SchmidtDecomposition, gain: &GainState, band_s: &SpectralBand, band_i: &SpectralBand) -> Result<f64> {
    let (ds, di) = nrf_preconditions(decomp, band_s, band_i)?;
    check(decomp, &ModeState::Squeezed(gain))?;
    let ut = decomp.unitary_s();
    let k = decomp.rank_kept;
    let os = weighted_gram(&ut, &ds);
    let oi = weighted_gram(&ut, &di);
    let total: f64 = (0..k).map(|n| gain.mean_photons[n] * (os[(n, n)].re + oi[(n, n)].re)).sum();
    if !(total > 0.0) {
        return Err(Error::Undefined("NRF needs photons in the bands (G > 0)".into()));
    }
    let diff: Vec<f64> = ds.iter().zip(&di).map(|(a, b)| a - b).collect();
    Ok(weighted_variance(decomp, gain, &diff)? / total)
}

/// NRF from Var(N_s) + Var(N_i) - 2 Cov(N_s, N_i) evaluated term by term.
pub fn nrf_wick(decomp: &SchmidtDecomposition, state: &ModeState, band_s: &SpectralBand, band_i: &SpectralBand) -> Result<f64> {
    let (ds, di) = nrf_preconditions(decomp, band_s, band_i)?;
    let (ms, _, vs) = wick_moments(decomp, state, &ds, &ds)?;
    let (mi, _, vi) = wick_moments(decomp, state, &di, &di)?;
    let (_, _, c) = wick_moments(decomp, state, &ds, &di)?;
    if !(ms + mi > 0.0) {
        return Err(Error::Undefined("NRF needs photons in the bands (G > 0)".into()));
    }
    Ok((vs + vi - 2.0 * c) / (ms + mi))
}
