mod common;

use bsv::jsa::FrequencyGrid;
use bsv::observables::*;
use bsv::schmidt::{redistribute, GainState, SchmidtDecomposition};
use bsv::Error;
use common::fock::{braket, fock_moments, Fock, CUTOFF};
use common::{real, toy_decomposition};
use faer::c64;
use proptest::prelude::*;

fn grid() -> FrequencyGrid {
    FrequencyGrid::new(2.35, 0.2, 16).unwrap()
}

/// Two orthonormal complex modes that do not respect the band split.
fn skewed_modes(g: &FrequencyGrid) -> Vec<Vec<c64>> {
    let n = g.len();
    let raw0: Vec<c64> = (0..n).map(|j| c64::from_polar(1.0 + 0.3 * j as f64, 0.2 * j as f64)).collect();
    let raw1: Vec<c64> = (0..n).map(|j| c64::from_polar(((j * 7) % 5) as f64 + 0.5, -0.4 * j as f64)).collect();
    let dw = g.step;
    let norm = |v: &[c64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt() * dw.sqrt();
    let u0: Vec<c64> = raw0.iter().map(|x| x / norm(&raw0)).collect();
    let p: c64 = u0.iter().zip(&raw1).map(|(a, b)| a.conj() * b).sum::<c64>() * dw;
    let w: Vec<c64> = raw1.iter().zip(&u0).map(|(b, a)| b - p * a).collect();
    let u1: Vec<c64> = w.iter().map(|x| x / norm(&w)).collect();
    vec![u0, u1]
}

fn toy(lambdas: [f64; 2], modes: Vec<Vec<c64>>) -> SchmidtDecomposition {
    toy_decomposition(grid(), lambdas.to_vec(), modes.clone(), modes)
}

fn bands(g: &FrequencyGrid) -> (Vec<f64>, Vec<f64>) {
    let lo = SpectralBand::new(g.first() - 0.5 * g.step, g.omega(6)).unwrap();
    let hi = SpectralBand::new(g.omega(9), g.last() + 0.5 * g.step).unwrap();
    (lo.indicator(g).unwrap(), hi.indicator(g).unwrap())
}

#[test]
fn wick_moments_match_fock_space() {
    let g = grid();
    let modes = skewed_modes(&g);
    let d = toy([0.7, 0.3], modes.clone());
    for gain in [0.2, 0.45, 0.6] {
        let state = redistribute(&d.lambdas, gain).unwrap();
        let r = [state.r[0], state.r[1]];
        let (a, b) = bands(&g);
        let mixed: Vec<f64> = (0..g.len()).map(|j| (j % 3) as f64 * 0.5).collect();
        for (x, y) in [(&a, &a), (&a, &b), (&b, &mixed), (&mixed, &mixed)] {
            let (ma, mb, cov) = wick_moments(&d, &ModeState::Squeezed(&state), x, y).unwrap();
            let (fa, fb, fcov) = fock_moments(&modes, g.step, r, x, y);
            assert!((ma - fa).abs() < 1e-6 * fa.abs().max(1e-3), "{ma} {fa}");
            assert!((mb - fb).abs() < 1e-6 * fb.abs().max(1e-3));
            assert!((cov - fcov).abs() < 1e-6 * fcov.abs().max(1e-3), "{gain}: {cov} {fcov}");
        }
        let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let (_, _, var) = fock_moments(&modes, g.step, r, &diff, &diff);
        let stable = weighted_variance(&d, &state, &diff).unwrap();
        assert!((stable - var).abs() < 1e-6 * var, "{stable} {var}");
    }
}

#[test]
fn fock_state_is_normalized() {
    let f = Fock { dim: CUTOFF };
    let psi = f.squeezed([0.6, 0.3]);
    assert!((braket(&psi, &psi).re - 1.0).abs() < 1e-9);
    let a = f.lower(0, &psi);
    assert!((braket(&a, &a).re - 0.6f64.sinh().powi(2)).abs() < 1e-9);
    let aa = f.lower(0, &a);
    assert!((braket(&psi, &aa).re - 0.6f64.sinh() * 0.6f64.cosh()).abs() < 1e-9);
}

fn disjoint_lobes(g: &FrequencyGrid) -> (Vec<c64>, Vec<c64>) {
    let n = g.len();
    let half = n / 2;
    let l: Vec<c64> = (0..n).map(|j| real(if j < half { ((j + 1) as f64).sqrt() } else { 0.0 })).collect();
    let nrm = l.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt() * g.step.sqrt();
    let l: Vec<c64> = l.iter().map(|x| x / nrm).collect();
    let r: Vec<c64> = (0..n).map(|j| l[n - 1 - j]).collect();
    (l, r)
}

#[test]
fn twin_beams_have_no_difference_noise() {
    let g = grid();
    let (l, r) = disjoint_lobes(&g);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus: Vec<c64> = l.iter().zip(&r).map(|(a, b)| (a + b) * s).collect();
    let minus: Vec<c64> = l.iter().zip(&r).map(|(a, b)| (a - b) * s).collect();
    // L R + R L = (plus plus - minus minus) / 2, so the idler partner of minus is -minus
    let flipped: Vec<c64> = minus.iter().map(|x| -x).collect();
    let d = toy_decomposition(g, vec![0.5, 0.5], vec![plus.clone(), minus], vec![plus, flipped]);
    let lo = SpectralBand::new(g.first() - g.step / 2.0, 2.35).unwrap();
    let hi = SpectralBand::new(2.35, g.last() + g.step / 2.0).unwrap();
    for gain in [0.5, 3.0, 10.0] {
        let st = redistribute(&d.lambdas, gain).unwrap();
        let v = nrf(&d, &st, &lo, &hi).unwrap();
        assert!(v.abs() < 1e-12, "{gain}: {v}");
        let w = nrf_wick(&d, &ModeState::Squeezed(&st), &lo, &hi).unwrap();
        assert!(w.abs() < 1e-6, "{gain}: {w}");
    }
}

#[test]
fn thermal_mode_nrf_is_one_plus_occupation() {
    let g = grid();
    let (l, r) = disjoint_lobes(&g);
    let d = toy([0.5, 0.5], vec![l, r]);
    let lo = SpectralBand::new(g.first() - g.step / 2.0, 2.35).unwrap();
    let hi = SpectralBand::new(2.35, g.last() + g.step / 2.0).unwrap();
    for nbar in [0.1, 2.0, 30.0] {
        let v = nrf_wick(&d, &ModeState::Thermal(&[nbar, 0.0]), &lo, &hi).unwrap();
        assert!((v - (1.0 + nbar)).abs() < 1e-12);
        let both = nrf_wick(&d, &ModeState::Thermal(&[nbar, nbar]), &lo, &hi).unwrap();
        assert!((both - (1.0 + nbar)).abs() < 1e-12);
    }
}

#[test]
fn band_means_add_up() {
    let g = grid();
    let d = toy([0.7, 0.3], skewed_modes(&g));
    let st = redistribute(&d.lambdas, 1.7).unwrap();
    let full = band_moments(&d, &st, &SpectralBand::full(&g)).unwrap();
    assert!((full.mean - st.total_photons()).abs() < 1e-12);
    let split = g.omega(7);
    let a = band_moments(&d, &st, &SpectralBand::new(g.first() - g.step / 2.0, split).unwrap()).unwrap();
    let b = band_moments(&d, &st, &SpectralBand::new(split, g.last() + g.step / 2.0).unwrap()).unwrap();
    assert!((a.mean + b.mean - full.mean).abs() < 1e-12);
    let ab = band_covariance(
        &d,
        &st,
        &SpectralBand::new(g.first() - g.step / 2.0, split).unwrap(),
        &SpectralBand::new(split, g.last() + g.step / 2.0).unwrap(),
    )
    .unwrap();
    assert!((a.variance + b.variance + 2.0 * ab - full.variance).abs() < 1e-9 * full.variance);
    // full-band variance of a squeezed vacuum: sum 2 sinh^2 cosh^2
    let expect: f64 = st.r.iter().map(|r| 2.0 * (r.sinh() * r.cosh()).powi(2)).sum();
    assert!((full.variance - expect).abs() < 1e-9 * expect);
}

#[test]
fn zero_gain() {
    let g = grid();
    let d = toy([0.7, 0.3], skewed_modes(&g));
    let st = redistribute(&d.lambdas, 0.0).unwrap();
    let m = band_moments(&d, &st, &SpectralBand::full(&g)).unwrap();
    assert_eq!(m.mean, 0.0);
    assert_eq!(m.variance, 0.0);
    let lo = SpectralBand::new(g.first() - g.step / 2.0, 2.35).unwrap();
    let hi = SpectralBand::new(2.35, g.last() + g.step / 2.0).unwrap();
    assert!(matches!(nrf(&d, &st, &lo, &hi), Err(Error::Undefined(_))));
    assert!(matches!(nrf_wick(&d, &ModeState::Squeezed(&st), &lo, &hi), Err(Error::Undefined(_))));
}

#[test]
fn band_rules() {
    let g = grid();
    let d = toy([0.7, 0.3], skewed_modes(&g));
    let st = redistribute(&d.lambdas, 1.0).unwrap();
    let at = SpectralBand::new(g.omega(3), g.omega(5)).unwrap();
    let ind = at.indicator(&g).unwrap();
    assert_eq!(ind.iter().sum::<f64>(), 2.0);
    assert_eq!((ind[3], ind[4], ind[5]), (1.0, 1.0, 0.0));
    assert!(SpectralBand::new(2.4, 2.3).is_err());
    let wide = SpectralBand::new(2.0, 2.4).unwrap();
    assert!(matches!(wide.indicator(&g), Err(Error::Precondition(_))));
    let a = SpectralBand::new(2.2, 2.36).unwrap();
    let b = SpectralBand::new(2.35, 2.5).unwrap();
    assert!(matches!(nrf(&d, &st, &a, &b), Err(Error::Precondition(_))));
    let nm = SpectralBand::from_nm(820.0, 780.0).unwrap();
    assert!(nm.lower < nm.upper);
}

#[test]
fn foreign_gain_state_rejected() {
    let g = grid();
    let d = toy([0.7, 0.3], skewed_modes(&g));
    let other = redistribute(&[0.6, 0.4], 1.0).unwrap();
    assert!(matches!(spectrum(&d, &other, SpectrumScale::Shape), Err(Error::Inconsistent(_))));
    assert!(matches!(
        band_moments(&d, &other, &SpectralBand::full(&g)),
        Err(Error::Inconsistent(_))
    ));
}

#[test]
fn spectrum_scales() {
    let g = grid();
    let d = toy([0.7, 0.3], skewed_modes(&g));
    let st = redistribute(&d.lambdas, 2.0).unwrap();
    let shape = spectrum(&d, &st, SpectrumScale::Shape).unwrap();
    assert!((shape.integral() - 1.0).abs() < 1e-12);
    let photons = spectrum(&d, &st, SpectrumScale::Photons).unwrap();
    assert!((photons.integral() - st.total_photons()).abs() < 1e-9);
    let peak = spectrum(&d, &st, SpectrumScale::PeakNormalized).unwrap();
    assert!((peak.max() - 1.0).abs() < 1e-15);
}

fn sampled(n: usize, half: f64, f: impl Fn(f64) -> f64) -> Spectrum {
    let grid = FrequencyGrid::new(2.35, half, n).unwrap();
    let values = grid.omegas().iter().map(|w| f(w - 2.35)).collect();
    Spectrum {
        grid,
        values,
        scale: SpectrumScale::Shape,
    }
}

#[test]
fn gaussian_fwhm() {
    let sigma = 0.01;
    let s = sampled(4001, 0.2, |x| (-x * x / (2.0 * sigma * sigma)).exp());
    let w = fwhm(&s).unwrap();
    let exact = 2.0 * (2.0 * 2f64.ln()).sqrt() * sigma;
    assert!((w.rad_per_fs / exact - 1.0).abs() < 1e-4);
    assert!(w.nm > 0.0);
}

#[test]
fn envelope_ignores_fringes() {
    let s = sampled(4001, 0.2, |x| (-x * x / 2e-3).exp() * (0.5 + 0.5 * (x * 900.0).cos()));
    let env = envelope_fwhm(&s).unwrap();
    let narrow = fwhm(&s).unwrap();
    assert!(env.rad_per_fs > 5.0 * narrow.rad_per_fs);
    let smooth = sampled(4001, 0.2, |x| (-x * x / 2e-3).exp());
    let fringed = fringe_visibility(&s, 2.3, 2.4, 0.02);
    assert!(fringed > 0.3, "{fringed}");
    assert!(fringe_visibility(&smooth, 2.3, 2.4, 0.02) < 0.05 * fringed);
}

#[test]
fn two_peaks_found_with_centroids() {
    let s = sampled(2001, 0.2, |x| (-(x - 0.08f64).powi(2) / 2e-4).exp() + 0.5 * (-(x + 0.1f64).powi(2) / 2e-4).exp());
    let p = peaks(&s, &PeakOptions::default());
    assert_eq!(p.len(), 2);
    assert!((p[0].omega_centroid_rad_per_fs - 2.25).abs() < 1e-4);
    assert!((p[1].omega_centroid_rad_per_fs - 2.43).abs() < 1e-4);
    assert!((p[0].height - 0.5).abs() < 1e-3);
    assert!(p[0].wavelength_centroid_nm > p[1].wavelength_centroid_nm);
}

#[test]
fn g2_requires_degeneracy() {
    let g = grid();
    let mut d = toy([0.7, 0.3], skewed_modes(&g));
    let st = redistribute(&d.lambdas, 2.0).unwrap();
    let v = g2_checked(&d, &st).unwrap();
    assert!((v - (1.0 + 2.0 / st.schmidt_number())).abs() < 1e-15);
    d.symmetric = false;
    assert!(matches!(g2_checked(&d, &st), Err(Error::Unsupported(_))));
}

fn lambdas() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-4f64..1.0, 1..30).prop_map(|mut v| {
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let s: f64 = v.iter().sum();
        v.iter().map(|x| x / s).collect()
    })
}

fn state(l: &[f64], g: f64) -> GainState {
    redistribute(l, g).unwrap()
}

proptest! {
    #[test]
    fn g2_between_one_and_three(l in lambdas(), g in 0.0f64..30.0) {
        let v = g2_integral(&state(&l, g));
        prop_assert!(v > 1.0 && v <= 3.0 + 1e-12);
    }
}
