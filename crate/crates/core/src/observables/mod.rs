//! Spectra, widths, g2 and photon-number statistics of the BSV state.

mod moments;
mod spectrum;

pub use moments::{
    band_covariance, band_moments, band_moments_of, nrf, nrf_wick, weighted_variance, wick_moments,
    BandMoments, ModeState, SpectralBand,
};
pub use spectrum::{
    envelope_fwhm, fringe_visibility, fwhm, g2_checked, g2_integral, peaks, spectrum, Peak,
    PeakOptions, Spectrum, SpectrumScale, Width,
};
