//! The RCS extraction chain: background subtraction → time-domain gating
//! → sphere calibration with distance correction → band-averaged RCS.
//!
//! Gating transforms a sweep to the two-way-delay domain with a windowed,
//! zero-padded inverse DFT, multiplies by a tapered gate centered on the
//! echo of interest, and transforms back. Both the target and the sphere
//! channel are gated with the *same* window, pad and gate span (each
//! centered on its own echo), so the window weighting and the gate's
//! band-edge convolution loss cancel exactly in the calibration ratio.
//!
//! `√σ_tg(f) = √σ_sph · S11,tg↔(f)/S11,sph↔(f) · (D_tg/D_sph)²` with
//! `σ_sph = π·R²`; the distance factor boosts the farther target's extra
//! two-way spreading loss. Band RCS is the plain mean of `|√σ_tg(f)|²`
//! over the grid, in linear power.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sweep::{
    to_frequency_domain, to_time_domain, FrequencyGrid, FrequencySweep, SweepError, TimeProfile,
    WindowKind, WindowSpec,
};
use crate::SPEED_OF_LIGHT_M_S;

/// Default analysis window for the gating transforms.
///
/// Hann keeps out-of-gate leakage below −60 dB a few resolution cells past
/// the gate edge, which the wider-sidelobe Tukey tapers cannot reach.
pub const DEFAULT_GATE_WINDOW: WindowKind = WindowKind::Hann;

/// Default taper across the gate span.
pub const DEFAULT_GATE_TAPER: WindowKind = WindowKind::Tukey { alpha: 0.25 };

/// Default zero-pad factor for gating and range profiles.
pub const DEFAULT_ZERO_PAD: usize = 4;

/// Default conditioning floor applied to the gating window.
///
/// Keeps the band-edge bins of both gated channels above the gated noise
/// floor so the per-bin calibration ratio stays well conditioned; the
/// clamp is identical in both channels and cancels in the ratio.
pub const DEFAULT_WINDOW_FLOOR: f64 = 1e-3;

/// Minimum peak-over-median-floor margin for gate design, dB.
pub const GATE_PEAK_MIN_DB: f64 = 10.0;

/// Bins of the gated sphere channel below this magnitude make the
/// calibration ratio meaningless.
pub const CALIBRATION_CONDITION_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("sweep grids differ: {context}")]
    GridMismatch { context: String },
    #[error(
        "gate design failed: strongest peak is {peak_db_over_median:.1} dB over the median \
         floor (need ≥ {required_db} dB); searched {search_lo_s:.3e}..{search_hi_s:.3e} s"
    )]
    GateDesignFailure {
        peak_db_over_median: f64,
        required_db: f64,
        search_lo_s: f64,
        search_hi_s: f64,
    },
    #[error("gate {lo_s:.3e}..{hi_s:.3e} s outside the representable span 0..{span_s:.3e} s")]
    GateOutsideSpan { lo_s: f64, hi_s: f64, span_s: f64 },
    #[error(
        "ill-conditioned calibration: |S11,sph| < {threshold:.0e} at {count} bins (first: {first:?})",
        count = bins.len(),
        first = bins.iter().take(8).collect::<Vec<_>>()
    )]
    IllConditionedCalibration { threshold: f64, bins: Vec<usize> },
    #[error("invalid calibration context: {0}")]
    InvalidContext(String),
    #[error("invalid gate parameters: {0}")]
    InvalidGateParams(String),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<PipelineError>,
    },
}

impl PipelineError {
    fn at(self, stage: &'static str) -> Self {
        PipelineError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

/// The measurement set behind one extraction: scene with target, empty
/// scene, calibration sphere, and the empty scene behind the sphere.
#[derive(Debug, Clone)]
pub struct MeasurementTriple {
    target: FrequencySweep,
    background: FrequencySweep,
    sphere: FrequencySweep,
    sphere_background: FrequencySweep,
}

impl MeasurementTriple {
    pub fn new(
        target: FrequencySweep,
        background: FrequencySweep,
        sphere: FrequencySweep,
        sphere_background: FrequencySweep,
    ) -> Result<Self, PipelineError> {
        let grid = target.grid();
        for (name, sweep) in [
            ("background", &background),
            ("sphere", &sphere),
            ("sphere_background", &sphere_background),
        ] {
            if sweep.grid() != grid {
                return Err(PipelineError::GridMismatch {
                    context: format!("target vs {name}"),
                });
            }
        }
        Ok(Self {
            target,
            background,
            sphere,
            sphere_background,
        })
    }

    pub fn target(&self) -> &FrequencySweep {
        &self.target
    }

    pub fn background(&self) -> &FrequencySweep {
        &self.background
    }

    pub fn sphere(&self) -> &FrequencySweep {
        &self.sphere
    }

    pub fn sphere_background(&self) -> &FrequencySweep {
        &self.sphere_background
    }
}

/// Delay gate: center, width and the taper shaping its edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGate {
    pub center_s: f64,
    pub span_s: f64,
    pub taper: WindowKind,
}

impl TimeGate {
    pub fn new(center_s: f64, span_s: f64, taper: WindowKind) -> Result<Self, PipelineError> {
        if !(span_s > 0.0 && span_s.is_finite() && center_s.is_finite()) {
            return Err(PipelineError::InvalidGateParams(format!(
                "span {span_s} s / center {center_s} s"
            )));
        }
        Ok(Self {
            center_s,
            span_s,
            taper,
        })
    }

    /// Gate weight at delay `t`.
    pub fn weight(&self, t_s: f64) -> f64 {
        let u = (t_s - (self.center_s - self.span_s / 2.0)) / self.span_s;
        self.taper.taper(u)
    }
}

/// Calibration constants: sphere radius (σ_sph = π·R²) and the two
/// measurement distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationContext {
    sphere_radius_m: f64,
    sigma_sph_m2: f64,
    d_target_m: f64,
    d_sphere_m: f64,
}

impl CalibrationContext {
    pub fn new(
        sphere_radius_m: f64,
        d_target_m: f64,
        d_sphere_m: f64,
    ) -> Result<Self, PipelineError> {
        if !(sphere_radius_m > 0.0) {
            return Err(PipelineError::InvalidContext(format!(
                "sphere radius {sphere_radius_m} m"
            )));
        }
        if !(d_target_m > 0.0 && d_sphere_m > 0.0) {
            return Err(PipelineError::InvalidContext(format!(
                "distances target {d_target_m} m, sphere {d_sphere_m} m"
            )));
        }
        Ok(Self {
            sphere_radius_m,
            sigma_sph_m2: std::f64::consts::PI * sphere_radius_m * sphere_radius_m,
            d_target_m,
            d_sphere_m,
        })
    }

    pub fn sphere_radius_m(&self) -> f64 {
        self.sphere_radius_m
    }

    /// Optical-limit sphere RCS π·R².
    pub fn sigma_sph_m2(&self) -> f64 {
        self.sigma_sph_m2
    }

    pub fn d_target_m(&self) -> f64 {
        self.d_target_m
    }

    pub fn d_sphere_m(&self) -> f64 {
        self.d_sphere_m
    }
}

/// Calibrated √σ_tg(f): complex, in meters, on the measurement grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSpectrum {
    grid: FrequencyGrid,
    sqrt_sigma: Vec<Complex64>,
    band_label: String,
    range_ref_m: f64,
}

impl SigmaSpectrum {
    pub fn new(
        grid: FrequencyGrid,
        sqrt_sigma: Vec<Complex64>,
        band_label: String,
        range_ref_m: f64,
    ) -> Result<Self, PipelineError> {
        if sqrt_sigma.len() != grid.n_samples() {
            return Err(PipelineError::GridMismatch {
                context: format!(
                    "sigma spectrum has {} samples, grid {}",
                    sqrt_sigma.len(),
                    grid.n_samples()
                ),
            });
        }
        if let Some(i) = sqrt_sigma
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(PipelineError::Sweep(SweepError::NonFiniteSample {
                index: i,
            }));
        }
        Ok(Self {
            grid,
            sqrt_sigma,
            band_label,
            range_ref_m,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn sqrt_sigma(&self) -> &[Complex64] {
        &self.sqrt_sigma
    }

    pub fn band_label(&self) -> &str {
        &self.band_label
    }

    pub fn with_band_label(mut self, band_label: impl Into<String>) -> Self {
        self.band_label = band_label.into();
        self
    }

    /// Absolute range of the spectrum's delay origin (the calibration
    /// sphere position): a scatterer at absolute range `r` shows up at
    /// `r − range_ref_m` on the profile's natural range axis.
    pub fn range_ref_m(&self) -> f64 {
        self.range_ref_m
    }
}

/// Samplewise complex difference; the scene's label is kept.
pub fn subtract_background(
    scene: &FrequencySweep,
    background: &FrequencySweep,
) -> Result<FrequencySweep, PipelineError> {
    if scene.grid() != background.grid() {
        return Err(PipelineError::GridMismatch {
            context: "scene vs background".into(),
        });
    }
    let samples: Vec<Complex64> = scene
        .samples()
        .iter()
        .zip(background.samples())
        .map(|(s, b)| s - b)
        .collect();
    Ok(FrequencySweep::new(*scene.grid(), samples, scene.label())?)
}

/// Gating configuration shared by both channels of an extraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GatingConfig {
    pub window: WindowKind,
    pub zero_pad_factor: usize,
    pub window_floor: f64,
}

impl Default for GatingConfig {
    fn default() -> Self {
        Self {
            window: DEFAULT_GATE_WINDOW,
            zero_pad_factor: DEFAULT_ZERO_PAD,
            window_floor: DEFAULT_WINDOW_FLOOR,
        }
    }
}

/// Place a gate on the strongest peak near an expected delay.
///
/// The search is limited to ±guard around `expected_delay_s` with
/// `guard = 2·target_extent_m/c`; the peak position is refined to sub-bin
/// accuracy by parabolic interpolation, and the gate span is
/// `2·(2·target_extent_m/c)` so the full target depth fits twice over.
///
/// Fails when the strongest in-guard peak clears the profile's median
/// magnitude by less than [`GATE_PEAK_MIN_DB`].
pub fn design_gate(
    profile: &TimeProfile,
    expected_delay_s: f64,
    target_extent_m: f64,
) -> Result<TimeGate, PipelineError> {
    design_gate_with(
        profile,
        expected_delay_s,
        target_extent_m,
        DEFAULT_GATE_TAPER,
        None,
    )
}

/// [`design_gate`] with an explicit taper and optional span override.
pub fn design_gate_with(
    profile: &TimeProfile,
    expected_delay_s: f64,
    target_extent_m: f64,
    taper: WindowKind,
    span_override_s: Option<f64>,
) -> Result<TimeGate, PipelineError> {
    if !(target_extent_m > 0.0) {
        return Err(PipelineError::InvalidGateParams(format!(
            "target extent {target_extent_m} m"
        )));
    }
    let total_span = profile.span_s();
    if !(0.0..total_span).contains(&expected_delay_s) {
        return Err(PipelineError::InvalidGateParams(format!(
            "expected delay {expected_delay_s:.3e} s outside profile span 0..{total_span:.3e} s"
        )));
    }
    let guard_s = 2.0 * target_extent_m / SPEED_OF_LIGHT_M_S;
    let dt = profile.dt_s();
    let lo = (((expected_delay_s - guard_s) / dt).floor().max(0.0)) as usize;
    let hi = ((((expected_delay_s + guard_s) / dt).ceil()) as usize).min(profile.len() - 1);

    let mags: Vec<f64> = profile.samples().iter().map(|v| v.norm()).collect();
    let (peak_idx, peak_mag) = mags[lo..=hi]
        .iter()
        .enumerate()
        .map(|(i, &m)| (lo + i, m))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("search window is non-empty");

    let mut sorted = mags.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let peak_db_over_median = 20.0 * (peak_mag / median.max(f64::MIN_POSITIVE)).log10();
    if !peak_db_over_median.is_finite() || peak_db_over_median < GATE_PEAK_MIN_DB {
        return Err(PipelineError::GateDesignFailure {
            peak_db_over_median,
            required_db: GATE_PEAK_MIN_DB,
            search_lo_s: lo as f64 * dt,
            search_hi_s: hi as f64 * dt,
        });
    }

    // sub-bin refinement keeps the two channels' gates congruent, which
    // makes the gating loss cancel in the calibration ratio
    let center_s = (peak_idx as f64 + parabolic_offset(&mags, peak_idx)) * dt;
    let span_s = span_override_s.unwrap_or(2.0 * (2.0 * target_extent_m / SPEED_OF_LIGHT_M_S));
    let gate = TimeGate::new(center_s, span_s, taper)?;
    check_gate_fits(&gate, total_span)?;
    Ok(gate)
}

fn parabolic_offset(mags: &[f64], k: usize) -> f64 {
    if k == 0 || k + 1 >= mags.len() {
        return 0.0;
    }
    let (a, b, c) = (mags[k - 1], mags[k], mags[k + 1]);
    let denom = a - 2.0 * b + c;
    if denom.abs() < f64::MIN_POSITIVE {
        return 0.0;
    }
    (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
}

fn check_gate_fits(gate: &TimeGate, total_span_s: f64) -> Result<(), PipelineError> {
    let lo = gate.center_s - gate.span_s / 2.0;
    let hi = gate.center_s + gate.span_s / 2.0;
    if lo < 0.0 || hi > total_span_s {
        return Err(PipelineError::GateOutsideSpan {
            lo_s: lo,
            hi_s: hi,
            span_s: total_span_s,
        });
    }
    Ok(())
}

/// Gate a sweep in the delay domain with the default [`GatingConfig`].
pub fn apply_gate(sweep: &FrequencySweep, gate: &TimeGate) -> Result<FrequencySweep, PipelineError> {
    apply_gate_with(sweep, gate, &GatingConfig::default())
}

/// Transform to the delay domain, multiply by the tapered gate, transform
/// back. The output keeps the analysis window weighting (times the gate's
/// convolution response); both cancel in [`calibrate`] because the sphere
/// channel is processed identically.
pub fn apply_gate_with(
    sweep: &FrequencySweep,
    gate: &TimeGate,
    config: &GatingConfig,
) -> Result<FrequencySweep, PipelineError> {
    check_gate_fits(gate, sweep.grid().unambiguous_delay_s())?;
    let window = WindowSpec::with_floor(config.window, sweep.len(), config.window_floor)?;
    let profile = to_time_domain(sweep, &window, config.zero_pad_factor)?;
    let gated: Vec<Complex64> = profile
        .samples()
        .iter()
        .enumerate()
        .map(|(k, v)| v * gate.weight(profile.time_s(k)))
        .collect();
    let gated_profile = TimeProfile::new(profile.dt_s(), profile.t0_s(), gated)?;
    let back = to_frequency_domain(&gated_profile, sweep.grid(), sweep.label())?;
    // to_frequency_domain returns the coherent-gain-normalized spectrum;
    // scale back so a fully in-gate sweep reproduces s·w
    let cg = window.coherent_gain();
    let samples: Vec<Complex64> = back.samples().iter().map(|v| v * cg).collect();
    Ok(FrequencySweep::new(*sweep.grid(), samples, sweep.label())?)
}

/// Calibrate a gated target channel against the gated sphere channel:
/// `√σ_tg(f) = √σ_sph · S_tg↔/S_sph↔ · (D_tg/D_sph)²`.
///
/// Any multiplicative system response common to both channels cancels in
/// the ratio. The result's delay origin is the sphere position, recorded
/// as `range_ref_m`.
pub fn calibrate(
    target_gated: &FrequencySweep,
    sphere_gated: &FrequencySweep,
    ctx: &CalibrationContext,
) -> Result<SigmaSpectrum, PipelineError> {
    if target_gated.grid() != sphere_gated.grid() {
        return Err(PipelineError::GridMismatch {
            context: "target vs sphere (gated)".into(),
        });
    }
    let bad: Vec<usize> = sphere_gated
        .samples()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() < CALIBRATION_CONDITION_FLOOR)
        .map(|(i, _)| i)
        .collect();
    if !bad.is_empty() {
        return Err(PipelineError::IllConditionedCalibration {
            threshold: CALIBRATION_CONDITION_FLOOR,
            bins: bad,
        });
    }
    let distance_factor = (ctx.d_target_m / ctx.d_sphere_m).powi(2);
    let scale = ctx.sigma_sph_m2.sqrt() * distance_factor;
    let sqrt_sigma: Vec<Complex64> = target_gated
        .samples()
        .iter()
        .zip(sphere_gated.samples())
        .map(|(t, s)| t / s * scale)
        .collect();
    SigmaSpectrum::new(
        *target_gated.grid(),
        sqrt_sigma,
        String::new(),
        ctx.d_sphere_m,
    )
}

/// Band RCS: the mean of `|√σ_tg(f_i)|²` — linear power, never dB.
pub fn band_average_rcs(spectrum: &SigmaSpectrum) -> f64 {
    let n = spectrum.sqrt_sigma().len();
    spectrum
        .sqrt_sigma()
        .iter()
        .map(|v| v.norm_sqr())
        .sum::<f64>()
        / n as f64
}

/// Gate placement summary, serialized into extraction records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateSummary {
    pub center_s: f64,
    pub span_s: f64,
}

impl From<&TimeGate> for GateSummary {
    fn from(g: &TimeGate) -> Self {
        Self {
            center_s: g.center_s,
            span_s: g.span_s,
        }
    }
}

/// Everything an extraction run wants to report besides the RCS itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionDiagnostics {
    pub target_gate: GateSummary,
    pub sphere_gate: GateSummary,
    pub window: WindowKind,
    pub zero_pad_factor: usize,
    pub window_floor: f64,
    pub gate_taper: WindowKind,
    pub span_overridden: bool,
    /// Subtracted-scene energy left outside the target gate, relative to
    /// the whole profile, in dB.
    pub residual_out_of_gate_db: f64,
}

/// Result of one full extraction.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub spectrum: SigmaSpectrum,
    pub rcs_m2: f64,
    pub diagnostics: ExtractionDiagnostics,
}

/// The serialized per-angle extraction record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionRecord {
    pub band: String,
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub rcs_m2: f64,
    pub rcs_dbsm: f64,
    pub gate: GateSummary,
    pub diagnostics: ExtractionDiagnostics,
}

/// Gate parameters for [`extract_rcs`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateParams {
    /// Radial extent of the target, m; sets guard and gate span.
    pub target_extent_m: f64,
    pub window: WindowKind,
    pub zero_pad_factor: usize,
    pub window_floor: f64,
    pub gate_taper: WindowKind,
    /// Overrides the span derived from the extent, s.
    pub span_override_s: Option<f64>,
}

impl GateParams {
    pub fn new(target_extent_m: f64) -> Self {
        Self {
            target_extent_m,
            window: DEFAULT_GATE_WINDOW,
            zero_pad_factor: DEFAULT_ZERO_PAD,
            window_floor: DEFAULT_WINDOW_FLOOR,
            gate_taper: DEFAULT_GATE_TAPER,
            span_override_s: None,
        }
    }

    fn gating_config(&self) -> GatingConfig {
        GatingConfig {
            window: self.window,
            zero_pad_factor: self.zero_pad_factor,
            window_floor: self.window_floor,
        }
    }
}

/// Full chain: subtract backgrounds, gate the target and sphere channels
/// (each at its own distance, same gate shape), calibrate, band-average.
pub fn extract_rcs(
    triple: &MeasurementTriple,
    ctx: &CalibrationContext,
    params: &GateParams,
) -> Result<Extraction, PipelineError> {
    let config = params.gating_config();
    let target = subtract_background(triple.target(), triple.background())
        .map_err(|e| e.at("background_subtraction(target)"))?;
    let sphere = subtract_background(triple.sphere(), triple.sphere_background())
        .map_err(|e| e.at("background_subtraction(sphere)"))?;

    let window = WindowSpec::with_floor(config.window, target.len(), config.window_floor)
        .map_err(|e| PipelineError::from(e).at("gating_window"))?;
    let target_profile = to_time_domain(&target, &window, config.zero_pad_factor)
        .map_err(|e| PipelineError::from(e).at("time_transform(target)"))?;
    let sphere_profile = to_time_domain(&sphere, &window, config.zero_pad_factor)
        .map_err(|e| PipelineError::from(e).at("time_transform(sphere)"))?;

    let expected_target_delay = 2.0 * ctx.d_target_m / SPEED_OF_LIGHT_M_S;
    let expected_sphere_delay = 2.0 * ctx.d_sphere_m / SPEED_OF_LIGHT_M_S;
    let target_gate = design_gate_with(
        &target_profile,
        expected_target_delay,
        params.target_extent_m,
        params.gate_taper,
        params.span_override_s,
    )
    .map_err(|e| e.at("gate_design(target)"))?;
    let sphere_gate = design_gate_with(
        &sphere_profile,
        expected_sphere_delay,
        params.target_extent_m,
        params.gate_taper,
        params.span_override_s,
    )
    .map_err(|e| e.at("gate_design(sphere)"))?;

    let target_gated = apply_gate_with(&target, &target_gate, &config)
        .map_err(|e| e.at("gate_apply(target)"))?;
    let sphere_gated = apply_gate_with(&sphere, &sphere_gate, &config)
        .map_err(|e| e.at("gate_apply(sphere)"))?;

    let spectrum =
        calibrate(&target_gated, &sphere_gated, ctx).map_err(|e| e.at("calibration"))?;
    let rcs_m2 = band_average_rcs(&spectrum);

    let diagnostics = ExtractionDiagnostics {
        target_gate: GateSummary::from(&target_gate),
        sphere_gate: GateSummary::from(&sphere_gate),
        window: config.window,
        zero_pad_factor: config.zero_pad_factor,
        window_floor: config.window_floor,
        gate_taper: params.gate_taper,
        span_overridden: params.span_override_s.is_some(),
        residual_out_of_gate_db: out_of_gate_energy_db(&target_profile, &target_gate),
    };
    Ok(Extraction {
        spectrum,
        rcs_m2,
        diagnostics,
    })
}

fn out_of_gate_energy_db(profile: &TimeProfile, gate: &TimeGate) -> f64 {
    let mut outside = 0.0;
    let mut total = 0.0;
    for (k, v) in profile.samples().iter().enumerate() {
        let e = v.norm_sqr();
        total += e;
        if gate.weight(profile.time_s(k)) == 0.0 {
            outside += e;
        }
    }
    if total <= 0.0 {
        return f64::NEG_INFINITY;
    }
    10.0 * (outside / total).log10()
}
