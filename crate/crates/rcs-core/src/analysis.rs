//! Post-extraction analysis: RCS heatmap grids, cross-band ΔRCS
//! statistics with Gaussian fits, range responses, range–azimuth images
//! and strongest-contribution extraction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::angle_key;
use crate::pipeline::{ExtractionRecord, SigmaSpectrum};
use crate::sweep::{to_time_domain, FrequencySweep, SweepLabel, WindowKind, WindowSpec};
use crate::SPEED_OF_LIGHT_M_S;

/// Window and padding used for display-path range responses.
pub const RANGE_RESPONSE_WINDOW: WindowKind = WindowKind::Hann;
pub const RANGE_RESPONSE_ZERO_PAD: usize = 4;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("no records to build a grid from")]
    Empty,
    #[error("records mix bands {a} and {b}")]
    MixedBands { a: String, b: String },
    #[error("duplicate record for θ={theta_deg}° φ={phi_deg}°")]
    DuplicateCell { theta_deg: f64, phi_deg: f64 },
    #[error("grids share no measured (θ, φ) cells")]
    NoSharedCells,
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("azimuth profiles disagree on the range axis")]
    InconsistentRangeAxes,
    #[error("need at least 2 azimuth profiles, got {0}")]
    TooFewProfiles(usize),
    #[error("k must be ≥ 1")]
    BadK,
    #[error("malformed grid csv: {0}")]
    GridCsv(String),
    #[error(transparent)]
    Sweep(#[from] crate::sweep::SweepError),
    #[error("pipeline: {0}")]
    Pipeline(#[from] crate::pipeline::PipelineError),
}

/// Scalar RCS over a (θ, φ) grid for one band, in dBsm.
///
/// `mask[i][j]` is true for cells that come from measured records; false
/// cells are mirrored (or absent, holding NaN).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RcsGrid {
    pub band_label: String,
    pub theta_values: Vec<f64>,
    pub phi_values: Vec<f64>,
    /// Row-major [θ][φ].
    pub rcs_dbsm: Vec<Vec<f64>>,
    pub mask: Vec<Vec<bool>>,
}

/// Build a grid from one band's extraction records.
///
/// With `mirror` set, azimuths in (180°, 360°) are synthesized from their
/// 360° − φ counterparts and masked as mirrored.
pub fn build_rcs_grid(records: &[ExtractionRecord], mirror: bool) -> Result<RcsGrid, AnalysisError> {
    if records.is_empty() {
        return Err(AnalysisError::Empty);
    }
    let band = &records[0].band;
    for r in records {
        if &r.band != band {
            return Err(AnalysisError::MixedBands {
                a: band.clone(),
                b: r.band.clone(),
            });
        }
    }
    let mut thetas: Vec<f64> = records.iter().map(|r| r.theta_deg).collect();
    thetas.sort_by(f64::total_cmp);
    thetas.dedup_by_key(|t| angle_key(*t));
    let mut phis: Vec<f64> = records.iter().map(|r| r.phi_deg).collect();
    phis.sort_by(f64::total_cmp);
    phis.dedup_by_key(|p| angle_key(*p));
    if mirror {
        let measured = phis.clone();
        for &phi in &measured {
            if phi > 0.0 && phi < 180.0 {
                let mirrored = 360.0 - phi;
                if !phis.iter().any(|&p| angle_key(p) == angle_key(mirrored)) {
                    phis.push(mirrored);
                }
            }
        }
        phis.sort_by(f64::total_cmp);
    }

    let t_index = |t: f64| thetas.iter().position(|&x| angle_key(x) == angle_key(t));
    let p_index = |p: f64| phis.iter().position(|&x| angle_key(x) == angle_key(p));
    let mut grid = vec![vec![f64::NAN; phis.len()]; thetas.len()];
    let mut mask = vec![vec![false; phis.len()]; thetas.len()];
    for r in records {
        let (i, j) = (
            t_index(r.theta_deg).expect("θ collected above"),
            p_index(r.phi_deg).expect("φ collected above"),
        );
        if mask[i][j] {
            return Err(AnalysisError::DuplicateCell {
                theta_deg: r.theta_deg,
                phi_deg: r.phi_deg,
            });
        }
        grid[i][j] = r.rcs_dbsm;
        mask[i][j] = true;
    }
    if mirror {
        for i in 0..thetas.len() {
            for (j, &phi) in phis.iter().enumerate() {
                if mask[i][j] || !(180.0..360.0).contains(&phi) {
                    continue;
                }
                if let Some(src) = p_index(360.0 - phi) {
                    if mask[i][src] {
                        grid[i][j] = grid[i][src];
                    }
                }
            }
        }
    }
    Ok(RcsGrid {
        band_label: band.clone(),
        theta_values: thetas,
        phi_values: phis,
        rcs_dbsm: grid,
        mask,
    })
}

impl RcsGrid {
    /// CSV: θ rows × φ columns of dBsm values; unmeasured cells are empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta_deg/phi_deg");
        for phi in &self.phi_values {
            out.push_str(&format!(",{phi}"));
        }
        out.push('\n');
        for (i, theta) in self.theta_values.iter().enumerate() {
            out.push_str(&format!("{theta}"));
            for v in &self.rcs_dbsm[i] {
                if v.is_nan() {
                    out.push(',');
                } else {
                    out.push_str(&format!(",{v:.12e}"));
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parse [`RcsGrid::to_csv`] output; every present cell is treated as
    /// measured (the JSON form carries the full mask).
    pub fn from_csv(band_label: &str, text: &str) -> Result<Self, AnalysisError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| {
            AnalysisError::GridCsv("empty input".into())
        })?;
        let mut cols = header.split(',');
        cols.next(); // corner cell
        let phi_values: Vec<f64> = cols
            .map(|c| {
                c.parse()
                    .map_err(|_| AnalysisError::GridCsv(format!("bad φ header {c:?}")))
            })
            .collect::<Result<_, _>>()?;
        let mut theta_values = Vec::new();
        let mut rcs_dbsm = Vec::new();
        let mut mask = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let theta: f64 = fields
                .next()
                .unwrap()
                .parse()
                .map_err(|_| AnalysisError::GridCsv(format!("bad θ in {line:?}")))?;
            let mut row = Vec::new();
            let mut row_mask = Vec::new();
            for field in fields {
                if field.is_empty() {
                    row.push(f64::NAN);
                    row_mask.push(false);
                } else {
                    row.push(
                        field
                            .parse()
                            .map_err(|_| AnalysisError::GridCsv(format!("bad value {field:?}")))?,
                    );
                    row_mask.push(true);
                }
            }
            if row.len() != phi_values.len() {
                return Err(AnalysisError::GridCsv(format!(
                    "row θ={theta} has {} values, header {}",
                    row.len(),
                    phi_values.len()
                )));
            }
            theta_values.push(theta);
            rcs_dbsm.push(row);
            mask.push(row_mask);
        }
        if theta_values.is_empty() {
            return Err(AnalysisError::GridCsv("no data rows".into()));
        }
        Ok(Self {
            band_label: band_label.to_string(),
            theta_values,
            phi_values,
            rcs_dbsm,
            mask,
        })
    }

    fn theta_index(&self, theta_deg: f64) -> Option<usize> {
        self.theta_values
            .iter()
            .position(|&t| angle_key(t) == angle_key(theta_deg))
    }

    fn phi_index(&self, phi_deg: f64) -> Option<usize> {
        self.phi_values
            .iter()
            .position(|&p| angle_key(p) == angle_key(phi_deg))
    }
}

/// One cross-band sample: ΔRCS = 10·log10(RCS₂/RCS₁) at a shared angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaRcsSample {
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub delta_db: f64,
}

/// Per-cell ΔRCS between two bands' grids.
///
/// `grid1` is the lower band by convention. Only cells measured (mask
/// true) in both grids contribute; mirrored cells never do.
pub fn delta_rcs(grid1: &RcsGrid, grid2: &RcsGrid) -> Result<Vec<DeltaRcsSample>, AnalysisError> {
    let mut samples = Vec::new();
    for (i1, &theta) in grid1.theta_values.iter().enumerate() {
        let Some(i2) = grid2.theta_index(theta) else {
            continue;
        };
        for (j1, &phi) in grid1.phi_values.iter().enumerate() {
            let Some(j2) = grid2.phi_index(phi) else {
                continue;
            };
            if !(grid1.mask[i1][j1] && grid2.mask[i2][j2]) {
                continue;
            }
            let delta_db = grid2.rcs_dbsm[i2][j2] - grid1.rcs_dbsm[i1][j1];
            if !delta_db.is_finite() {
                continue;
            }
            samples.push(DeltaRcsSample {
                theta_deg: theta,
                phi_deg: phi,
                delta_db,
            });
        }
    }
    if samples.is_empty() {
        return Err(AnalysisError::NoSharedCells);
    }
    Ok(samples)
}

/// CSV for ΔRCS samples.
pub fn delta_rcs_csv(samples: &[DeltaRcsSample]) -> String {
    let mut out = String::from("theta_deg,phi_deg,delta_db\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{:.12e}\n",
            s.theta_deg, s.phi_deg, s.delta_db
        ));
    }
    out
}

/// Maximum-likelihood Gaussian fit: sample mean and population standard
/// deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub mu_db: f64,
    pub sigma_db: f64,
    pub n_samples: usize,
}

pub fn fit_gaussian(samples: &[f64]) -> Result<GaussianFit, AnalysisError> {
    let n = samples.len();
    if n < 2 {
        return Err(AnalysisError::TooFewSamples(n));
    }
    let mu = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / n as f64;
    Ok(GaussianFit {
        mu_db: mu,
        sigma_db: var.sqrt(),
        n_samples: n,
    })
}

impl GaussianFit {
    /// Gaussian density at `x` for the fitted parameters.
    pub fn pdf(&self, x: f64) -> f64 {
        if self.sigma_db == 0.0 {
            return if x == self.mu_db { f64::INFINITY } else { 0.0 };
        }
        let z = (x - self.mu_db) / self.sigma_db;
        (-0.5 * z * z).exp() / (self.sigma_db * (2.0 * std::f64::consts::PI).sqrt())
    }
}

/// Histogram with Freedman–Diaconis bin width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `counts.len() + 1` ascending edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

pub fn histogram(samples: &[f64]) -> Result<Histogram, AnalysisError> {
    if samples.len() < 2 {
        return Err(AnalysisError::TooFewSamples(samples.len()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let min = sorted[0];
    let max = *sorted.last().unwrap();
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let width = 2.0 * iqr / (sorted.len() as f64).cbrt();
    let n_bins = if width > 0.0 && max > min {
        (((max - min) / width).ceil() as usize).clamp(1, 200)
    } else {
        1
    };
    let (lo, hi) = if max > min {
        (min, max)
    } else {
        (min - 0.5, max + 0.5)
    };
    let step = (hi - lo) / n_bins as f64;
    let edges: Vec<f64> = (0..=n_bins).map(|i| lo + i as f64 * step).collect();
    let mut counts = vec![0usize; n_bins];
    for &x in samples {
        let k = (((x - lo) / step) as usize).min(n_bins - 1);
        counts[k] += 1;
    }
    Ok(Histogram { edges, counts })
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let k = pos.floor() as usize;
    let frac = pos - k as f64;
    if k + 1 < sorted.len() {
        sorted[k] * (1.0 - frac) + sorted[k + 1] * frac
    } else {
        sorted[k]
    }
}

/// Range profile of |√σ_tg| centered on the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeProfile {
    pub ranges_m: Vec<f64>,
    pub magnitudes: Vec<f64>,
}

/// Transform a calibrated spectrum to the range domain (`r = c·t/2`) and
/// recenter so the target center at `d_target_m` maps to range 0.
///
/// The spectrum's delay origin is the calibration reference recorded in
/// `range_ref_m`; the circular range axis is unwrapped to ±half the
/// unambiguous span around the target.
pub fn range_response(
    spectrum: &SigmaSpectrum,
    d_target_m: f64,
) -> Result<RangeProfile, AnalysisError> {
    let grid = *spectrum.grid();
    let sweep = FrequencySweep::new(grid, spectrum.sqrt_sigma().to_vec(), SweepLabel::Target)?;
    let window = WindowSpec::new(RANGE_RESPONSE_WINDOW, sweep.len())?;
    let profile = to_time_domain(&sweep, &window, RANGE_RESPONSE_ZERO_PAD)?;
    let period_m = SPEED_OF_LIGHT_M_S * grid.unambiguous_delay_s() / 2.0;
    let offset = d_target_m - spectrum.range_ref_m();
    let mut points: Vec<(f64, f64)> = profile
        .samples()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let natural = SPEED_OF_LIGHT_M_S * profile.time_s(k) / 2.0;
            let centered = (natural - offset + period_m / 2.0).rem_euclid(period_m) - period_m / 2.0;
            (centered, v.norm())
        })
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(RangeProfile {
        ranges_m: points.iter().map(|p| p.0).collect(),
        magnitudes: points.iter().map(|p| p.1).collect(),
    })
}

/// Angular interpolation for unmeasured image columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    Nearest,
    Linear,
}

impl std::fmt::Display for Interpolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Interpolation::Nearest => write!(f, "nearest"),
            Interpolation::Linear => write!(f, "linear"),
        }
    }
}

impl std::str::FromStr for Interpolation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nearest" => Ok(Interpolation::Nearest),
            "linear" => Ok(Interpolation::Linear),
            other => Err(format!("unknown interpolation {other:?}")),
        }
    }
}

/// |√σ_tg| over (range, φ) at one elevation, with interpolated columns for
/// unmeasured azimuths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeAzimuthImage {
    pub range_axis_m: Vec<f64>,
    pub phi_axis_deg: Vec<f64>,
    /// Row-major [range][φ].
    pub magnitude: Vec<Vec<f64>>,
    /// True for columns holding measured data verbatim.
    pub measured_mask: Vec<bool>,
    pub interpolation_note: String,
}

/// Assemble a range–azimuth image from per-φ profiles at a fixed θ.
///
/// Measured columns are inserted verbatim; azimuths in between are filled
/// by the chosen interpolation of magnitudes on a `phi_step_deg` raster.
pub fn build_range_azimuth_image(
    profiles: &[(f64, RangeProfile)],
    interp: Interpolation,
    phi_step_deg: f64,
) -> Result<RangeAzimuthImage, AnalysisError> {
    if profiles.len() < 2 {
        return Err(AnalysisError::TooFewProfiles(profiles.len()));
    }
    let mut sorted: Vec<&(f64, RangeProfile)> = profiles.iter().collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let range_axis = &sorted[0].1.ranges_m;
    for (_, p) in &sorted {
        if p.ranges_m.len() != range_axis.len()
            || p.ranges_m
                .iter()
                .zip(range_axis)
                .any(|(a, b)| (a - b).abs() > 1e-9 * b.abs().max(1.0))
        {
            return Err(AnalysisError::InconsistentRangeAxes);
        }
    }
    if !(phi_step_deg > 0.0) {
        return Err(AnalysisError::GridCsv(format!(
            "phi step must be positive, got {phi_step_deg}"
        )));
    }

    let phi_min = sorted[0].0;
    let phi_max = sorted.last().unwrap().0;
    let mut phi_axis: Vec<f64> = Vec::new();
    let mut measured_mask = Vec::new();
    let steps = ((phi_max - phi_min) / phi_step_deg).round() as usize;
    let measured_keys: Vec<i64> = sorted.iter().map(|(p, _)| angle_key(*p)).collect();
    for k in 0..=steps {
        let phi = phi_min + k as f64 * phi_step_deg;
        phi_axis.push(phi);
        measured_mask.push(measured_keys.contains(&angle_key(phi)));
    }
    // measured azimuths that fall off the raster still get exact columns
    for (phi, _) in &sorted {
        if !phi_axis.iter().any(|&p| angle_key(p) == angle_key(*phi)) {
            phi_axis.push(*phi);
            measured_mask.push(true);
        }
    }
    let mut order: Vec<usize> = (0..phi_axis.len()).collect();
    order.sort_by(|&a, &b| phi_axis[a].total_cmp(&phi_axis[b]));
    let phi_axis: Vec<f64> = order.iter().map(|&i| phi_axis[i]).collect();
    let measured_mask: Vec<bool> = order.iter().map(|&i| measured_mask[i]).collect();

    let n_range = range_axis.len();
    let mut magnitude = vec![vec![0.0; phi_axis.len()]; n_range];
    for (j, (&phi, &measured)) in phi_axis.iter().zip(&measured_mask).enumerate() {
        if measured {
            let (_, profile) = sorted
                .iter()
                .find(|(p, _)| angle_key(*p) == angle_key(phi))
                .expect("measured column has a profile");
            for i in 0..n_range {
                magnitude[i][j] = profile.magnitudes[i];
            }
            continue;
        }
        // bracketing measured profiles (clamped at the ends)
        let after = sorted.iter().position(|(p, _)| *p > phi);
        let (lo, hi) = match after {
            Some(0) => (&sorted[0], &sorted[0]),
            Some(k) => (&sorted[k - 1], &sorted[k]),
            None => (sorted.last().unwrap(), sorted.last().unwrap()),
        };
        for i in 0..n_range {
            magnitude[i][j] = match interp {
                Interpolation::Nearest => {
                    if (phi - lo.0).abs() <= (hi.0 - phi).abs() {
                        lo.1.magnitudes[i]
                    } else {
                        hi.1.magnitudes[i]
                    }
                }
                Interpolation::Linear => {
                    if hi.0 == lo.0 {
                        lo.1.magnitudes[i]
                    } else {
                        let t = (phi - lo.0) / (hi.0 - lo.0);
                        lo.1.magnitudes[i] * (1.0 - t) + hi.1.magnitudes[i] * t
                    }
                }
            };
        }
    }
    Ok(RangeAzimuthImage {
        range_axis_m: range_axis.clone(),
        phi_axis_deg: phi_axis,
        magnitude,
        measured_mask,
        interpolation_note: format!("{interp} over azimuth, {phi_step_deg}° raster"),
    })
}

impl RangeAzimuthImage {
    /// CSV: range rows × φ columns of |√σ| values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("range_m/phi_deg");
        for phi in &self.phi_axis_deg {
            out.push_str(&format!(",{phi}"));
        }
        out.push('\n');
        for (i, r) in self.range_axis_m.iter().enumerate() {
            out.push_str(&format!("{r:.6e}"));
            for v in &self.magnitude[i] {
                out.push_str(&format!(",{v:.12e}"));
            }
            out.push('\n');
        }
        out
    }
}

/// One dominant scattering point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContributionPoint {
    pub range_m: f64,
    pub phi_deg: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopContributors {
    pub points: Vec<ContributionPoint>,
    /// Set when fewer local maxima exist than requested.
    pub truncated: bool,
}

/// The `k` largest local maxima over the measured (non-interpolated)
/// columns, sorted by magnitude descending. Ties break toward smaller
/// |range|, then smaller φ.
pub fn top_contributors(
    image: &RangeAzimuthImage,
    k: usize,
) -> Result<TopContributors, AnalysisError> {
    if k == 0 {
        return Err(AnalysisError::BadK);
    }
    let n = image.range_axis_m.len();
    let mut peaks: Vec<ContributionPoint> = Vec::new();
    for (j, (&phi, &measured)) in image
        .phi_axis_deg
        .iter()
        .zip(&image.measured_mask)
        .enumerate()
    {
        if !measured {
            continue;
        }
        for i in 0..n {
            let v = image.magnitude[i][j];
            let up = i == 0 || v >= image.magnitude[i - 1][j];
            let down = i + 1 == n || v >= image.magnitude[i + 1][j];
            if up && down {
                peaks.push(ContributionPoint {
                    range_m: image.range_axis_m[i],
                    phi_deg: phi,
                    magnitude: v,
                });
            }
        }
    }
    peaks.sort_by(|a, b| {
        b.magnitude
            .total_cmp(&a.magnitude)
            .then(a.range_m.abs().total_cmp(&b.range_m.abs()))
            .then(a.phi_deg.total_cmp(&b.phi_deg))
    });
    let truncated = peaks.len() < k;
    peaks.truncate(k);
    Ok(TopContributors {
        points: peaks,
        truncated,
    })
}
