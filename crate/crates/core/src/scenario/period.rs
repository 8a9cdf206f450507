use std::f64::consts::PI;

use crate::dispersion::{wavevector, Material};
use crate::error::{Error, Result};
use crate::units::omega_from_nm;

/// Fringe period in the GVD length, 2π/(k_s + k_i) at ω_p/2, in µm.
pub fn analytic_period(medium: &Material, pump_nm: f64) -> Result<f64> {
    let w = omega_from_nm(pump_nm) / 2.0;
    let k = wavevector(medium, w)?;
    if k <= 0.0 {
        return Err(Error::Numerical(format!("non-positive wavevector in {}", medium.name)));
    }
    Ok(2.0 * PI / (2.0 * k) * 1e3)
}

/// Variance explained by a least-squares fit of a + b cos + c sin at frequency f.
fn power(xs: &[f64], ys: &[f64], f: f64) -> f64 {
    let mut m = [[0.0; 3]; 3];
    let mut v = [0.0; 3];
    for (x, y) in xs.iter().zip(ys) {
        let a = 2.0 * PI * f * (x - xs[0]);
        let basis = [1.0, a.cos(), a.sin()];
        for i in 0..3 {
            v[i] += basis[i] * y;
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
        }
    }
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d.abs() < 1e-300 {
        return 0.0;
    }
    let mut explained = 0.0;
    for k in 0..3 {
        let mut mk = m;
        for i in 0..3 {
            mk[i][k] = v[i];
        }
        explained += det(&mk) / d * v[k];
    }
    explained
}

/// Dominant oscillation period of `ys(xs)` from a least-squares periodogram,
/// refined by golden-section search around the coarse maximum. Same units as `xs`.
pub fn oscillation_period(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len();
    if n < 8 || ys.len() != n {
        return Err(Error::Precondition("need at least 8 matching samples".into()));
    }
    let span = xs[n - 1] - xs[0];
    if !(span > 0.0) {
        return Err(Error::Precondition("samples must be increasing".into()));
    }
    let mean = ys.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = ys.iter().map(|y| y - mean).collect();
    if centered.iter().all(|v| v.abs() < 1e-14) {
        return Err(Error::Undefined("signal is constant".into()));
    }
    let df = 1.0 / span;
    let f_max = 0.5 * (n - 1) as f64 / span;
    let steps = ((f_max - df) / (df / 8.0)).ceil() as usize;
    let mut best = (df, 0.0);
    for i in 0..=steps {
        let f = df + i as f64 * df / 8.0;
        let p = power(xs, &centered, f);
        if p > best.1 {
            best = (f, p);
        }
    }
    let (mut a, mut b) = (best.0 - df / 8.0, best.0 + df / 8.0);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if power(xs, &centered, c) > power(xs, &centered, d) {
            b = d;
        } else {
            a = c;
        }
    }
    Ok(2.0 / (a + b))
}
