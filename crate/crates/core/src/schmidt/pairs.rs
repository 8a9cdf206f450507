use faer::c64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::schmidt::decompose::SchmidtDecomposition;

/// Default relative tolerance for |lambda_n - lambda_n+1| / lambda_n.
pub const PAIR_TOLERANCE: f64 = 1e-3;

/// (u_n + u_n+1)/sqrt 2 and (u_n - u_n+1)/sqrt 2 for a degenerate pair.
pub fn pair_superpositions(
    decomp: &SchmidtDecomposition,
    n: usize,
    tolerance: f64,
) -> Result<(Vec<c64>, Vec<c64>)> {
    if n + 1 >= decomp.rank_kept {
        return Err(Error::Precondition(format!(
            "pair ({n}, {}) needs {} kept modes, have {}",
            n + 1,
            n + 2,
            decomp.rank_kept
        )));
    }
    if !decomp.symmetric {
        return Err(Error::Precondition(
            "pair superpositions need a degenerate (F = F^T) configuration".into(),
        ));
    }
    let (a, b) = (decomp.lambdas[n], decomp.lambdas[n + 1]);
    let gap = (a - b).abs();
    if gap > tolerance * a {
        return Err(Error::NonDegeneratePair { n, gap });
    }
    let (u, w) = (&decomp.modes_s[n], &decomp.modes_s[n + 1]);
    let plus = u.iter().zip(w).map(|(x, y)| (x + y) * FRAC_1_SQRT_2).collect();
    let minus = u.iter().zip(w).map(|(x, y)| (x - y) * FRAC_1_SQRT_2).collect();
    Ok((plus, minus))
}

/// sup_j |u_j - parity * u_{N-1-j}| / sup_j |u_j|, parity = +1 or -1.
pub fn reflection_defect(u: &[c64], parity: f64) -> f64 {
    let n = u.len();
    let peak = u.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let worst = (0..n)
        .map(|j| (u[j] - u[n - 1 - j] * parity).norm())
        .fold(0.0, f64::max);
    worst / peak
}

/// L2 weight of a grid function below and above the grid center (dw weighted,
/// a center sample for odd N is split evenly).
pub fn half_axis_weights(u: &[c64], dw: f64) -> (f64, f64) {
    let n = u.len();
    let mut lo = 0.0;
    let mut hi = 0.0;
    for (j, x) in u.iter().enumerate() {
        let w = x.norm_sqr() * dw;
        if 2 * j + 1 < n {
            lo += w;
        } else if 2 * j + 1 > n {
            hi += w;
        } else {
            lo += 0.5 * w;
            hi += 0.5 * w;
        }
    }
    (lo, hi)
}
