use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsa::{FrequencyGrid, JointSpectralAmplitude, Normalization};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// Keep modes until the cumulative weight reaches 1 - this.
    pub cumulative_tolerance: f64,
    pub max_rank: Option<usize>,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            cumulative_tolerance: 1e-8,
            max_rank: None,
        }
    }
}

impl Truncation {
    pub fn full() -> Self {
        Self {
            cumulative_tolerance: 0.0,
            max_rank: None,
        }
    }

    pub fn rank(max_rank: usize) -> Self {
        Self {
            cumulative_tolerance: 0.0,
            max_rank: Some(max_rank),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposeOptions {
    pub truncation: Truncation,
    /// Relative eigenvalue gap below which two modes are treated as one
    /// degenerate subspace and rotated into reflection eigenvectors.
    pub degeneracy_tolerance: f64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            truncation: Truncation::default(),
            degeneracy_tolerance: 1e-10,
        }
    }
}

/// F = sum_n sqrt(lambda_n) u_n(omega_s) v_n(omega_i).
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub grid: FrequencyGrid,
    /// Kept eigenvalues, descending.
    pub lambdas: Vec<f64>,
    /// Every eigenvalue of the grid problem, descending.
    pub all_lambdas: Vec<f64>,
    /// u_n sampled on the grid, unit norm under dw weighting.
    pub modes_s: Vec<Vec<c64>>,
    pub modes_i: Vec<Vec<c64>>,
    pub rank_kept: usize,
    /// F = F^T on the grid (degenerate type I).
    pub symmetric: bool,
}

/// <a, b> with dw weighting.
pub fn inner(a: &[c64], b: &[c64], dw: f64) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<c64>() * dw
}

fn argmax_abs(u: &[c64]) -> usize {
    let mut best = 0;
    for (j, x) in u.iter().enumerate() {
        if x.norm() > u[best].norm() {
            best = j;
        }
    }
    best
}

/// Eigenvectors of the Hermitian 2x2 [[p, q], [conj q, s]], larger eigenvalue first.
fn hermitian_eigvecs(p: f64, q: c64, s: f64) -> [[c64; 2]; 2] {
    let m = 0.5 * (p + s);
    let r = (0.25 * (p - s) * (p - s) + q.norm_sqr()).sqrt();
    if q.norm() <= 1e-300 {
        let one = c64::new(1.0, 0.0);
        let zero = c64::new(0.0, 0.0);
        return if p >= s { [[one, zero], [zero, one]] } else { [[zero, one], [one, zero]] };
    }
    let vec = |e: f64| {
        let (a, b) = if (e - p).abs() >= (e - s).abs() {
            (q, c64::new(e - p, 0.0))
        } else {
            (c64::new(e - s, 0.0), q.conj())
        };
        let nrm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        [a / nrm, b / nrm]
    };
    [vec(m + r), vec(m - r)]
}

impl SchmidtDecomposition {
    pub fn len(&self) -> usize {
        self.rank_kept
    }

    pub fn is_empty(&self) -> bool {
        self.rank_kept == 0
    }

    pub fn discarded_weight(&self) -> f64 {
        self.all_lambdas[self.rank_kept..].iter().sum()
    }

    /// u_n(omega_j) * sqrt(dw) as an N x rank matrix (orthonormal columns).
    pub fn unitary_s(&self) -> Mat<c64> {
        let s = self.grid.step.sqrt();
        Mat::from_fn(self.grid.len(), self.rank_kept, |j, n| self.modes_s[n][j] * s)
    }

    /// v_n(omega_k) * sqrt(dw) as a rank x N matrix.
    pub fn unitary_i_rows(&self) -> Mat<c64> {
        let s = self.grid.step.sqrt();
        Mat::from_fn(self.rank_kept, self.grid.len(), |n, k| self.modes_i[n][k] * s)
    }

    /// sum_n sqrt(lambda_n) u_n v_n^T over the kept modes.
    pub fn reconstruct(&self) -> JointSpectralAmplitude {
        let n = self.grid.len();
        let mut f = Mat::<c64>::zeros(n, n);
        for (m, lam) in self.lambdas.iter().enumerate() {
            let a = lam.sqrt();
            let u = &self.modes_s[m];
            let v = &self.modes_i[m];
            for k in 0..n {
                let vk = v[k] * a;
                for j in 0..n {
                    f[(j, k)] += u[j] * vk;
                }
            }
        }
        JointSpectralAmplitude {
            grid: self.grid,
            values: f,
            normalization: Normalization::UnitL2,
        }
    }

    /// Reflection overlap <u_a, R u_b> with R: omega -> omega_p - omega.
    pub fn reflection_overlap(&self, a: &[c64], b: &[c64]) -> c64 {
        let n = self.grid.len();
        (0..n).map(|j| a[j].conj() * b[self.grid.reflect(j)]).sum::<c64>() * self.grid.step
    }

    fn apply_phase_convention(&mut self, n: usize) -> c64 {
        let j = argmax_abs(&self.modes_s[n]);
        let ph = c64::from_polar(1.0, -self.modes_s[n][j].arg());
        self.scale_pair(n, ph);
        ph
    }

    fn scale_pair(&mut self, n: usize, ph: c64) {
        for x in self.modes_s[n].iter_mut() {
            *x *= ph;
        }
        let inv = ph.conj();
        for x in self.modes_i[n].iter_mut() {
            *x *= inv;
        }
    }

    /// Rotate a degenerate pair into reflection eigenvectors, symmetric-like first.
    fn rotate_pair(&mut self, a: usize) {
        let b = a + 1;
        let (ua, ub) = (self.modes_s[a].clone(), self.modes_s[b].clone());
        let p = self.reflection_overlap(&ua, &ua).re;
        let s = self.reflection_overlap(&ub, &ub).re;
        let q = self.reflection_overlap(&ua, &ub);
        let w = hermitian_eigvecs(p, q, s);
        let (va, vb) = (self.modes_i[a].clone(), self.modes_i[b].clone());
        for (slot, wv) in [(a, w[0]), (b, w[1])] {
            self.modes_s[slot] = ua.iter().zip(&ub).map(|(x, y)| wv[0] * x + wv[1] * y).collect();
            self.modes_i[slot] = va
                .iter()
                .zip(&vb)
                .map(|(x, y)| wv[0].conj() * x + wv[1].conj() * y)
                .collect();
        }
        // common phase, then fix the partner's sign so that u_a + u_b lives
        // mostly below the degenerate frequency
        let ph = self.apply_phase_convention(a);
        self.scale_pair(b, ph);
        let half = self.grid.len() / 2;
        let lower: c64 = (0..half)
            .map(|j| self.modes_s[a][j].conj() * self.modes_s[b][j])
            .sum();
        if lower.re < 0.0 {
            self.scale_pair(b, c64::new(-1.0, 0.0));
        }
    }
}

/// SVD of F dw with the deterministic phase and pairing conventions.
pub fn decompose(tpa: &JointSpectralAmplitude, opts: &DecomposeOptions) -> Result<SchmidtDecomposition> {
    let grid = tpa.grid;
    let n = grid.len();
    let dw = grid.step;
    let scaled = Mat::from_fn(n, n, |j, k| tpa.values[(j, k)] * dw);
    for k in 0..n {
        for j in 0..n {
            let v = scaled[(j, k)];
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Numerical(format!("non-finite TPA entry at ({j}, {k})")));
            }
        }
    }
    let svd = scaled.svd().map_err(|e| {
        Error::Numerical(format!(
            "SVD did not converge ({e:?}) for a {n}x{n} matrix, Frobenius norm {}",
            scaled.norm_l2()
        ))
    })?;
    let sv = svd.S();
    let all: Vec<f64> = (0..n).map(|i| sv[i].re * sv[i].re).collect();

    let t = &opts.truncation;
    let mut rank = n;
    if t.cumulative_tolerance > 0.0 {
        let mut acc = 0.0;
        for (i, l) in all.iter().enumerate() {
            acc += l;
            if acc >= 1.0 - t.cumulative_tolerance {
                rank = i + 1;
                break;
            }
        }
    }
    if let Some(m) = t.max_rank {
        rank = rank.min(m.max(1));
    }

    let u = svd.U();
    let v = svd.V();
    let isq = dw.sqrt().recip();
    let modes_s = (0..rank)
        .map(|m| (0..n).map(|j| u[(j, m)] * isq).collect())
        .collect();
    let modes_i = (0..rank)
        .map(|m| (0..n).map(|k| v[(k, m)].conj() * isq).collect())
        .collect();

    let mut d = SchmidtDecomposition {
        grid,
        lambdas: all[..rank].to_vec(),
        all_lambdas: all,
        modes_s,
        modes_i,
        rank_kept: rank,
        symmetric: tpa.transpose_asymmetry() < 1e-12,
    };

    let mut m = 0;
    while m < rank {
        let pair = m + 1 < rank
            && d.lambdas[m] > 0.0
            && (d.lambdas[m] - d.lambdas[m + 1]) / d.lambdas[m] < opts.degeneracy_tolerance
            && (m + 2 >= d.all_lambdas.len()
                || (d.lambdas[m + 1] - d.all_lambdas[m + 2]) / d.lambdas[m] >= opts.degeneracy_tolerance);
        if pair {
            d.rotate_pair(m);
            m += 2;
        } else {
            d.apply_phase_convention(m);
            m += 1;
        }
    }
    Ok(d)
}
