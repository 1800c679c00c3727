//! Raw sweep file parsing (Touchstone `.s1p`, CSV) and the campaign
//! manifest mapping (band, θ, φ, scenario) to files.

mod csv;
mod manifest;
mod touchstone;

pub use csv::{parse_csv_sweep, DataFormat, FileFormat, FrequencyUnit, SweepFileHeader};
pub use manifest::{
    load_campaign, BandSpec, Campaign, CampaignManifest, Environment, Scenario, SphereSpec,
    SweepEntry, TargetSpec, ValidationIssue, MANIFEST_SCHEMA_VERSION,
};
pub use touchstone::{parse_touchstone_s1p, write_touchstone_s1p};

use thiserror::Error;

use crate::sweep::SweepError;

/// Relative tolerance for the uniform-grid check applied to parsed files.
pub const GRID_UNIFORMITY_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing option line (expected e.g. \"# GHz S RI R 50\")")]
    MissingOptionLine,
    #[error("line {line}: frequency {f_hz} Hz is not strictly increasing")]
    NonMonotonic { line: usize, f_hz: f64 },
    #[error("line {line}: frequency off the uniform grid by {rel_err:.3e} (tolerance {tol:.0e})")]
    NonUniformGrid { line: usize, rel_err: f64, tol: f64 },
    #[error("declared {declared} points but parsed {parsed}")]
    PointCountMismatch { declared: usize, parsed: usize },
    #[error("header/column mismatch: expected {expected:?}, got {got:?}")]
    ColumnMismatch {
        expected: Vec<String>,
        got: Vec<String>,
    },
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error("manifest schema: {0}")]
    Schema(String),
    #[error("manifest json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("campaign validation failed:\n{}", format_issues(.0))]
    Validation(Vec<ValidationIssue>),
    #[error("no entry for band {band} θ={theta_deg}° φ={phi_deg}° ({scenario})")]
    MissingEntry {
        band: String,
        theta_deg: f64,
        phi_deg: f64,
        scenario: &'static str,
    },
    #[error("unknown band {0}")]
    UnknownBand(String),
}

fn format_issues(issues: &[ValidationIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("  - {i}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Angles are matched on a milli-degree integer key so values that came
/// through JSON or file names compare reliably.
pub(crate) fn angle_key(deg: f64) -> i64 {
    (deg * 1000.0).round() as i64
}

/// File-name friendly angle token: `40.0` → `"40"`, `12.5` → `"12.5"`.
pub fn angle_token(deg: f64) -> String {
    let key = angle_key(deg);
    if key % 1000 == 0 {
        format!("{}", key / 1000)
    } else {
        format!("{}", key as f64 / 1000.0)
    }
}
