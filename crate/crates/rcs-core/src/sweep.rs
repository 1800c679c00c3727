//! Sampled-sweep domain types and spectral primitives.
//!
//! A [`FrequencySweep`] holds complex S11 samples on a uniform
//! [`FrequencyGrid`]. [`to_time_domain`] converts a sweep into a
//! [`TimeProfile`] over two-way delay via a windowed, zero-padded inverse
//! DFT; [`to_frequency_domain`] is its exact inverse on the in-band bins.
//!
//! Transform conventions, with `N` grid samples padded to `M` bins:
//!
//! ```text
//! x[k] = (1/N) · Σ_i  s[i]·w[i]/cg · exp(+j2πik/M)      k = 0..M
//! s_w[i] = (N/M) · Σ_k  x[k]       · exp(−j2πik/M)      i = 0..N
//! ```
//!
//! so a unit in-band tone keeps unit peak magnitude in the delay domain
//! (`cg` is the window's coherent gain), and the pair round-trips exactly
//! up to the window weighting `w[i]/cg`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from sweep construction and spectral transforms.
#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
    #[error("sample count {got} does not match grid sample count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite sample at index {index}")]
    NonFiniteSample { index: usize },
    #[error("zero-pad factor {0} outside 1..=16")]
    InvalidZeroPad(usize),
    #[error("tukey shape parameter {0} outside [0, 1]")]
    InvalidTukeyAlpha(f64),
    #[error("window has {got} samples, sweep has {expected}")]
    WindowLengthMismatch { expected: usize, got: usize },
    #[error("time profile length {got} is not a positive multiple of grid length {grid}")]
    ProfileLengthMismatch { grid: usize, got: usize },
    #[error("time profile step {0} s must be positive and finite")]
    InvalidTimeStep(f64),
}

/// Uniform frequency grid: `n_samples` points from `f_start_hz` to
/// `f_stop_hz` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    f_start_hz: f64,
    f_stop_hz: f64,
    n_samples: usize,
}

impl FrequencyGrid {
    pub fn new(f_start_hz: f64, f_stop_hz: f64, n_samples: usize) -> Result<Self, SweepError> {
        if !(f_start_hz.is_finite() && f_stop_hz.is_finite()) || f_start_hz <= 0.0 {
            return Err(SweepError::InvalidGrid(format!(
                "need f_stop > f_start > 0, got start {f_start_hz} stop {f_stop_hz}"
            )));
        }
        if f_stop_hz <= f_start_hz {
            return Err(SweepError::InvalidGrid(format!(
                "f_stop {f_stop_hz} must exceed f_start {f_start_hz}"
            )));
        }
        if n_samples < 2 {
            return Err(SweepError::InvalidGrid(format!(
                "need at least 2 samples, got {n_samples}"
            )));
        }
        Ok(Self {
            f_start_hz,
            f_stop_hz,
            n_samples,
        })
    }

    pub fn f_start_hz(&self) -> f64 {
        self.f_start_hz
    }

    pub fn f_stop_hz(&self) -> f64 {
        self.f_stop_hz
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    /// Swept span `f_stop − f_start`.
    pub fn bandwidth_hz(&self) -> f64 {
        self.f_stop_hz - self.f_start_hz
    }

    /// Spacing between adjacent samples.
    pub fn step_hz(&self) -> f64 {
        self.bandwidth_hz() / (self.n_samples - 1) as f64
    }

    /// Frequency of sample `i`: `f_start + i·(f_stop − f_start)/(n − 1)`.
    pub fn frequency_hz(&self, i: usize) -> f64 {
        self.f_start_hz + i as f64 * self.step_hz()
    }

    pub fn center_hz(&self) -> f64 {
        0.5 * (self.f_start_hz + self.f_stop_hz)
    }

    /// Largest two-way delay representable without aliasing, `1/Δf`.
    pub fn unambiguous_delay_s(&self) -> f64 {
        1.0 / self.step_hz()
    }

    /// Compare grids within a relative tolerance on the band edges.
    pub fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= rel_tol * a.abs().max(b.abs());
        self.n_samples == other.n_samples
            && close(self.f_start_hz, other.f_start_hz)
            && close(self.f_stop_hz, other.f_stop_hz)
    }
}

/// Scenario tag carried by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepLabel {
    Target,
    Background,
    Sphere,
}

impl std::fmt::Display for SweepLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepLabel::Target => write!(f, "target"),
            SweepLabel::Background => write!(f, "background"),
            SweepLabel::Sphere => write!(f, "sphere"),
        }
    }
}

/// Complex S11 reflection samples on a uniform frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySweep {
    grid: FrequencyGrid,
    samples: Vec<Complex64>,
    label: SweepLabel,
}

impl FrequencySweep {
    pub fn new(
        grid: FrequencyGrid,
        samples: Vec<Complex64>,
        label: SweepLabel,
    ) -> Result<Self, SweepError> {
        if samples.len() != grid.n_samples() {
            return Err(SweepError::LengthMismatch {
                expected: grid.n_samples(),
                got: samples.len(),
            });
        }
        if let Some(index) = first_non_finite(&samples) {
            return Err(SweepError::NonFiniteSample { index });
        }
        Ok(Self {
            grid,
            samples,
            label,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn label(&self) -> SweepLabel {
        self.label
    }

    /// Same data under a different scenario tag.
    pub fn with_label(mut self, label: SweepLabel) -> Self {
        self.label = label;
        self
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn first_non_finite(samples: &[Complex64]) -> Option<usize> {
    samples
        .iter()
        .position(|s| !(s.re.is_finite() && s.im.is_finite()))
}

/// Complex amplitude profile over two-way delay.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeProfile {
    dt_s: f64,
    t0_s: f64,
    samples: Vec<Complex64>,
}

impl TimeProfile {
    pub fn new(dt_s: f64, t0_s: f64, samples: Vec<Complex64>) -> Result<Self, SweepError> {
        if !(dt_s.is_finite() && dt_s > 0.0) {
            return Err(SweepError::InvalidTimeStep(dt_s));
        }
        Ok(Self {
            dt_s,
            t0_s,
            samples,
        })
    }

    pub fn dt_s(&self) -> f64 {
        self.dt_s
    }

    pub fn t0_s(&self) -> f64 {
        self.t0_s
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time of bin `k`.
    pub fn time_s(&self, k: usize) -> f64 {
        self.t0_s + k as f64 * self.dt_s
    }

    /// Total represented span `len·dt`.
    pub fn span_s(&self) -> f64 {
        self.samples.len() as f64 * self.dt_s
    }
}

/// Taper family for windowing and gate shaping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WindowKind {
    Rectangular,
    Hann,
    Tukey { alpha: f64 },
}

impl WindowKind {
    /// Taper value at normalized position `u ∈ [0, 1]`; zero outside.
    pub fn taper(&self, u: f64) -> f64 {
        if !(0.0..=1.0).contains(&u) {
            return 0.0;
        }
        match *self {
            WindowKind::Rectangular => 1.0,
            WindowKind::Hann => 0.5 * (1.0 - (2.0 * std::f64::consts::PI * u).cos()),
            WindowKind::Tukey { alpha } => {
                if alpha <= 0.0 {
                    1.0
                } else if u < alpha / 2.0 {
                    0.5 * (1.0 + (std::f64::consts::PI * (2.0 * u / alpha - 1.0)).cos())
                } else if u > 1.0 - alpha / 2.0 {
                    0.5 * (1.0
                        + (std::f64::consts::PI * (2.0 * u / alpha - 2.0 / alpha + 1.0)).cos())
                } else {
                    1.0
                }
            }
        }
    }

    fn validate(&self) -> Result<(), SweepError> {
        if let WindowKind::Tukey { alpha } = *self {
            if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
                return Err(SweepError::InvalidTukeyAlpha(alpha));
            }
        }
        Ok(())
    }
}

/// A realized window: taper samples for a specific sweep length plus the
/// coherent gain (mean of the samples) used for amplitude normalization.
///
/// Samples are taken at the interior positions `(i+1)/(n+1)` so tapered
/// windows stay strictly positive at the band edges.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSpec {
    kind: WindowKind,
    samples: Vec<f64>,
    coherent_gain: f64,
}

impl WindowSpec {
    pub fn new(kind: WindowKind, n_samples: usize) -> Result<Self, SweepError> {
        Self::with_floor(kind, n_samples, 0.0)
    }

    /// Window with every sample clamped to at least `floor`.
    ///
    /// Gating divides spectra bin-by-bin downstream; the clamp keeps the
    /// band-edge bins above the gated residual floor so those ratios stay
    /// conditioned. `floor = 0` gives the pure taper.
    pub fn with_floor(kind: WindowKind, n_samples: usize, floor: f64) -> Result<Self, SweepError> {
        kind.validate()?;
        if n_samples == 0 {
            return Err(SweepError::InvalidGrid("empty window".into()));
        }
        let samples: Vec<f64> = (0..n_samples)
            .map(|i| {
                let u = (i + 1) as f64 / (n_samples + 1) as f64;
                kind.taper(u).max(floor)
            })
            .collect();
        let coherent_gain = samples.iter().sum::<f64>() / n_samples as f64;
        Ok(Self {
            kind,
            samples,
            coherent_gain,
        })
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn coherent_gain(&self) -> f64 {
        self.coherent_gain
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Largest accepted zero-pad factor.
pub const MAX_ZERO_PAD: usize = 16;

/// Inverse DFT of the window-weighted sweep, zero padded to
/// `zero_pad_factor × n_samples` bins.
///
/// Amplitudes are divided by the window coherent gain so an in-band unit
/// tone keeps unit peak magnitude. `t0 = 0`; `dt = 1/(M·Δf)` with `M` the
/// padded length, consistent with the grid's unambiguous delay span.
pub fn to_time_domain(
    sweep: &FrequencySweep,
    window: &WindowSpec,
    zero_pad_factor: usize,
) -> Result<TimeProfile, SweepError> {
    if !(1..=MAX_ZERO_PAD).contains(&zero_pad_factor) {
        return Err(SweepError::InvalidZeroPad(zero_pad_factor));
    }
    if window.len() != sweep.len() {
        return Err(SweepError::WindowLengthMismatch {
            expected: sweep.len(),
            got: window.len(),
        });
    }
    if let Some(index) = first_non_finite(sweep.samples()) {
        return Err(SweepError::NonFiniteSample { index });
    }
    let n = sweep.len();
    let m = n * zero_pad_factor;
    let cg = window.coherent_gain();
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (i, (s, w)) in sweep
        .samples()
        .iter()
        .zip(window.samples().iter())
        .enumerate()
    {
        buf[i] = s * (w / cg);
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    let scale = 1.0 / n as f64;
    for v in &mut buf {
        *v *= scale;
    }
    let dt = 1.0 / (m as f64 * sweep.grid().step_hz());
    TimeProfile::new(dt, 0.0, buf)
}

/// Forward DFT back onto the grid's in-band bins; exact inverse of
/// [`to_time_domain`] up to the window weighting `w[i]/cg`.
///
/// The returned sweep therefore still carries the window of the profile
/// it came from; dividing it out is the caller's choice.
pub fn to_frequency_domain(
    profile: &TimeProfile,
    grid: &FrequencyGrid,
    label: SweepLabel,
) -> Result<FrequencySweep, SweepError> {
    let n = grid.n_samples();
    let m = profile.len();
    if m == 0 || m % n != 0 || m / n > MAX_ZERO_PAD {
        return Err(SweepError::ProfileLengthMismatch { grid: n, got: m });
    }
    let mut buf = profile.samples().to_vec();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let scale = n as f64 / m as f64;
    let samples: Vec<Complex64> = buf[..n].iter().map(|v| v * scale).collect();
    FrequencySweep::new(*grid, samples, label)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn rel_close(a: Complex64, b: Complex64, tol: f64, scale: f64) -> bool {
        (a - b).norm() <= tol * scale
    }

    /// Direct evaluation of the inverse-DFT sum; oracle for the FFT path.
    fn naive_time_profile(sweep: &FrequencySweep, window: &WindowSpec, pad: usize) -> Vec<Complex64> {
        let n = sweep.len();
        let m = n * pad;
        let cg = window.coherent_gain();
        (0..m)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, (s, w)) in sweep
                    .samples()
                    .iter()
                    .zip(window.samples().iter())
                    .enumerate()
                {
                    let phase = 2.0 * std::f64::consts::PI * (i * k) as f64 / m as f64;
                    acc += s * (w / cg) * Complex64::new(phase.cos(), phase.sin());
                }
                acc / n as f64
            })
            .collect()
    }

    fn grid16() -> FrequencyGrid {
        FrequencyGrid::new(1.0e9, 2.5e9, 16).unwrap()
    }

    #[test]
    fn grid_invariants() {
        assert!(FrequencyGrid::new(2e9, 1e9, 16).is_err());
        assert!(FrequencyGrid::new(0.0, 1e9, 16).is_err());
        assert!(FrequencyGrid::new(1e9, 2e9, 1).is_err());
        let g = FrequencyGrid::new(10e9, 14e9, 2001).unwrap();
        assert!(close(g.step_hz(), 2e6, 1e-6));
        assert!(close(g.frequency_hz(2000), 14e9, 1e-3));
        assert!(close(g.frequency_hz(0), 10e9, 0.0));
    }

    #[test]
    fn sweep_rejects_bad_input() {
        let g = grid16();
        let err = FrequencySweep::new(g, vec![Complex64::new(1.0, 0.0); 4], SweepLabel::Target);
        assert!(matches!(err, Err(SweepError::LengthMismatch { .. })));
        let mut s = vec![Complex64::new(1.0, 0.0); 16];
        s[3] = Complex64::new(f64::NAN, 0.0);
        let err = FrequencySweep::new(g, s, SweepLabel::Target);
        assert!(matches!(err, Err(SweepError::NonFiniteSample { index: 3 })));
    }

    #[test]
    fn constant_spectrum_is_impulse_at_zero() {
        let g = grid16();
        let s = FrequencySweep::new(g, vec![Complex64::new(1.0, 0.0); 16], SweepLabel::Target)
            .unwrap();
        let w = WindowSpec::new(WindowKind::Rectangular, 16).unwrap();
        let p = to_time_domain(&s, &w, 1).unwrap();
        assert!(close(p.samples()[0].norm(), 1.0, 1e-12));
        for k in 1..p.len() {
            assert!(p.samples()[k].norm() < 1e-12, "bin {k} not zero");
        }
    }

    #[test]
    fn delayed_tone_peaks_at_its_delay() {
        // spectrum exp(−j2πf·τ) on a 16-sample grid, τ a multiple of 1/B;
        // expected profile frozen from the direct DFT sum
        let g = grid16();
        let b = g.bandwidth_hz();
        let tau = 2.0 / b;
        let samples: Vec<Complex64> = (0..16)
            .map(|i| {
                let phase = -2.0 * std::f64::consts::PI * g.frequency_hz(i) * tau;
                Complex64::new(phase.cos(), phase.sin())
            })
            .collect();
        let s = FrequencySweep::new(g, samples, SweepLabel::Target).unwrap();
        let w = WindowSpec::new(WindowKind::Rectangular, 16).unwrap();
        let p = to_time_domain(&s, &w, 1).unwrap();
        let oracle = naive_time_profile(&s, &w, 1);
        for (k, (got, want)) in p.samples().iter().zip(oracle.iter()).enumerate() {
            assert!(rel_close(*got, *want, 1e-12, 1.0), "bin {k}");
        }
        let peak = (0..p.len()).max_by(|&a, &b| {
            p.samples()[a]
                .norm()
                .partial_cmp(&p.samples()[b].norm())
                .unwrap()
        });
        let t_peak = p.time_s(peak.unwrap());
        assert!(
            (t_peak - tau).abs() <= p.dt_s(),
            "peak at {t_peak}, expected {tau}"
        );
    }

    #[test]
    fn zero_spectrum_zero_profile() {
        let g = grid16();
        let s = FrequencySweep::new(g, vec![Complex64::new(0.0, 0.0); 16], SweepLabel::Background)
            .unwrap();
        let w = WindowSpec::new(WindowKind::Hann, 16).unwrap();
        let p = to_time_domain(&s, &w, 4).unwrap();
        assert!(p.samples().iter().all(|v| v.norm() == 0.0));
        let back = to_frequency_domain(&p, &g, SweepLabel::Background).unwrap();
        assert!(back.samples().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn zero_pad_bounds() {
        let g = grid16();
        let s = FrequencySweep::new(g, vec![Complex64::new(1.0, 0.0); 16], SweepLabel::Target)
            .unwrap();
        let w = WindowSpec::new(WindowKind::Rectangular, 16).unwrap();
        assert!(matches!(
            to_time_domain(&s, &w, 0),
            Err(SweepError::InvalidZeroPad(0))
        ));
        assert!(matches!(
            to_time_domain(&s, &w, 17),
            Err(SweepError::InvalidZeroPad(17))
        ));
        // padded dt shrinks by the pad factor
        let p1 = to_time_domain(&s, &w, 1).unwrap();
        let p4 = to_time_domain(&s, &w, 4).unwrap();
        assert!(close(p1.dt_s() / 4.0, p4.dt_s(), 1e-24));
        assert_eq!(p4.len(), 64);
    }

    #[test]
    fn hann_round_trip_recovers_after_window_division() {
        let g = FrequencyGrid::new(1e9, 3e9, 64).unwrap();
        let samples: Vec<Complex64> = (0..64)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.71).cos()))
            .collect();
        let s = FrequencySweep::new(g, samples.clone(), SweepLabel::Target).unwrap();
        let w = WindowSpec::new(WindowKind::Hann, 64).unwrap();
        let p = to_time_domain(&s, &w, 2).unwrap();
        let back = to_frequency_domain(&p, &g, SweepLabel::Target).unwrap();
        let cg = w.coherent_gain();
        for i in 0..64 {
            let wi = w.samples()[i];
            if wi < 0.01 {
                continue; // near the window zeros the division is ill-conditioned
            }
            let recovered = back.samples()[i] * (cg / wi);
            assert!(
                rel_close(recovered, samples[i], 1e-8, 1.0),
                "bin {i}: {recovered} vs {}",
                samples[i]
            );
        }
    }

    #[test]
    fn tukey_limits_match_rect_and_hann() {
        let rect = WindowSpec::new(WindowKind::Rectangular, 32).unwrap();
        let t0 = WindowSpec::new(WindowKind::Tukey { alpha: 0.0 }, 32).unwrap();
        assert_eq!(rect.samples(), t0.samples());
        let hann = WindowSpec::new(WindowKind::Hann, 32).unwrap();
        let t1 = WindowSpec::new(WindowKind::Tukey { alpha: 1.0 }, 32).unwrap();
        for (a, b) in hann.samples().iter().zip(t1.samples()) {
            assert!(close(*a, *b, 1e-12));
        }
        assert!(WindowSpec::new(WindowKind::Tukey { alpha: 1.5 }, 32).is_err());
        assert!(WindowSpec::new(WindowKind::Tukey { alpha: -0.1 }, 32).is_err());
    }

    #[test]
    fn window_floor_clamps_and_gain_tracks() {
        let w = WindowSpec::with_floor(WindowKind::Hann, 101, 1e-3).unwrap();
        assert!(w.samples().iter().all(|&v| v >= 1e-3));
        assert!(w.coherent_gain() > 0.0);
        let mean = w.samples().iter().sum::<f64>() / 101.0;
        assert!(close(w.coherent_gain(), mean, 1e-15));
    }

    #[test]
    fn interior_sampling_keeps_windows_positive() {
        for kind in [WindowKind::Hann, WindowKind::Tukey { alpha: 0.25 }] {
            let w = WindowSpec::new(kind, 2001).unwrap();
            assert!(w.samples().iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn parseval_rectangular_no_padding() {
        let g = FrequencyGrid::new(1e9, 3e9, 64).unwrap();
        let samples: Vec<Complex64> = (0..64)
            .map(|i| Complex64::new((i as f64 * 1.3).sin(), (i as f64 * 0.9).cos() * 0.5))
            .collect();
        let s = FrequencySweep::new(g, samples, SweepLabel::Target).unwrap();
        let w = WindowSpec::new(WindowKind::Rectangular, 64).unwrap();
        let p = to_time_domain(&s, &w, 1).unwrap();
        let e_freq: f64 = s.samples().iter().map(|v| v.norm_sqr()).sum();
        // with x[k] = (1/N)·Σ s·e^{...}, Parseval reads Σ|s|² = N·Σ|x|²
        let e_time: f64 = p.samples().iter().map(|v| v.norm_sqr()).sum::<f64>() * 64.0;
        assert!(
            (e_freq - e_time).abs() <= 1e-9 * e_freq,
            "{e_freq} vs {e_time}"
        );
    }
}
