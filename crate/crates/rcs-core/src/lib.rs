//! Monostatic radar cross-section (RCS) extraction toolkit.
//!
//! The crate turns raw S11 frequency sweeps from a vector network analyzer
//! into calibrated RCS values and derived products:
//!
//! - [`sweep`] — sampled-sweep domain types plus windowed forward/inverse
//!   DFTs between the frequency and two-way-delay domains.
//! - [`ingest`] — Touchstone `.s1p` / CSV sweep parsers and the campaign
//!   manifest that maps (band, elevation, azimuth, scenario) to files.
//! - [`pipeline`] — the extraction chain: background subtraction,
//!   time-domain gating, sphere calibration, band-averaged RCS.
//! - [`analysis`] — RCS heatmap grids, cross-band ΔRCS statistics with
//!   Gaussian fits, range responses and range–azimuth images.
//! - [`geometry`] — campaign planning: far-field distance, beam-footprint
//!   distance and elevation placement.
//! - [`synth`] — synthetic point-scatterer campaigns with known ground
//!   truth, used as the test oracle for everything above.
//! - [`vna`] — SCPI-over-TCP acquisition client and a mock instrument
//!   server for integration tests.
//! - [`render`] — deterministic SVG renderers for heatmaps, histograms
//!   and range–azimuth images.

pub mod analysis;
pub mod geometry;
pub mod ingest;
pub mod pipeline;
pub mod render;
pub mod sweep;
pub mod synth;
pub mod vna;

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Convert a power-like quantity (σ, energy ratios) to decibels.
pub fn power_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Convert an amplitude-like quantity (|S11|, |√σ|) to decibels.
pub fn amplitude_db(linear: f64) -> f64 {
    20.0 * linear.log10()
}

/// RCS in dBsm: 10·log10(σ / 1 m²).
pub fn dbsm(sigma_m2: f64) -> f64 {
    power_db(sigma_m2)
}
