//! CSV sweep reader with a declared column specification.
//!
//! Files carry a header row naming the columns; the caller declares, via
//! [`SweepFileHeader`], which frequency unit and complex encoding to
//! expect. Canonical column names depend on the declared encoding:
//!
//! | encoding | columns |
//! |----------|---------|
//! | real/imag | `freq_<unit>,s11_re,s11_im` |
//! | mag/angle | `freq_<unit>,s11_mag,s11_deg` |
//! | dB/angle  | `freq_<unit>,s11_db,s11_deg` |

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::touchstone::build_uniform_sweep;
use super::IngestError;
use crate::sweep::{FrequencySweep, SweepLabel};

/// On-disk carrier for a sweep file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileFormat {
    Touchstone,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyUnit {
    Hz,
    Khz,
    Mhz,
    Ghz,
}

impl FrequencyUnit {
    pub fn multiplier(&self) -> f64 {
        match self {
            FrequencyUnit::Hz => 1.0,
            FrequencyUnit::Khz => 1e3,
            FrequencyUnit::Mhz => 1e6,
            FrequencyUnit::Ghz => 1e9,
        }
    }

    fn suffix(&self) -> &'static str {
        match self {
            FrequencyUnit::Hz => "hz",
            FrequencyUnit::Khz => "khz",
            FrequencyUnit::Mhz => "mhz",
            FrequencyUnit::Ghz => "ghz",
        }
    }
}

/// Complex-sample encoding of the two data columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFormat {
    RealImag,
    MagAngle,
    DbAngle,
}

/// Declared layout of a sweep file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepFileHeader {
    pub format: FileFormat,
    pub frequency_unit: FrequencyUnit,
    pub data_format: DataFormat,
    /// Expected row count; checked against the parsed rows when present.
    pub n_points: Option<usize>,
}

impl SweepFileHeader {
    /// The canonical CSV layout used by campaign files: Hz, real/imag.
    pub fn canonical_csv() -> Self {
        Self {
            format: FileFormat::Csv,
            frequency_unit: FrequencyUnit::Hz,
            data_format: DataFormat::RealImag,
            n_points: None,
        }
    }

    fn column_names(&self) -> Vec<String> {
        let f = format!("freq_{}", self.frequency_unit.suffix());
        match self.data_format {
            DataFormat::RealImag => vec![f, "s11_re".into(), "s11_im".into()],
            DataFormat::MagAngle => vec![f, "s11_mag".into(), "s11_deg".into()],
            DataFormat::DbAngle => vec![f, "s11_db".into(), "s11_deg".into()],
        }
    }
}

/// Parse a CSV sweep against the declared header.
///
/// Normalization matches the Touchstone path: frequencies in Hz, samples
/// as real/imaginary, strict monotonicity, uniform-grid check, and errors
/// that name the offending 1-based line.
pub fn parse_csv_sweep(
    bytes: &[u8],
    header: &SweepFileHeader,
) -> Result<FrequencySweep, IngestError> {
    let text = std::str::from_utf8(bytes).map_err(|e| IngestError::Parse {
        line: 0,
        message: format!("not valid utf-8: {e}"),
    })?;
    let expected = header.column_names();
    let mut rows: Vec<(usize, f64, Complex64)> = Vec::new();
    let mut header_seen = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if !header_seen {
            let got: Vec<String> = fields.iter().map(|s| s.to_ascii_lowercase()).collect();
            if got != expected {
                return Err(IngestError::ColumnMismatch { expected, got });
            }
            header_seen = true;
            continue;
        }
        if fields.len() != 3 {
            return Err(IngestError::Parse {
                line: line_no,
                message: format!("expected 3 columns, got {}", fields.len()),
            });
        }
        let parse_f = |s: &str, what: &str| -> Result<f64, IngestError> {
            s.parse::<f64>().map_err(|_| IngestError::Parse {
                line: line_no,
                message: format!("unparseable {what}: {s:?}"),
            })
        };
        let f_hz = parse_f(fields[0], "frequency")? * header.frequency_unit.multiplier();
        let a = parse_f(fields[1], "value")?;
        let b = parse_f(fields[2], "value")?;
        let sample = match header.data_format {
            DataFormat::RealImag => Complex64::new(a, b),
            DataFormat::MagAngle => Complex64::from_polar(a, b.to_radians()),
            DataFormat::DbAngle => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
        };
        if let Some(&(_, prev, _)) = rows.last() {
            if f_hz <= prev {
                return Err(IngestError::NonMonotonic { line: line_no, f_hz });
            }
        }
        rows.push((line_no, f_hz, sample));
    }

    if !header_seen {
        return Err(IngestError::ColumnMismatch {
            expected,
            got: Vec::new(),
        });
    }
    if let Some(declared) = header.n_points {
        if declared != rows.len() {
            return Err(IngestError::PointCountMismatch {
                declared,
                parsed: rows.len(),
            });
        }
    }
    build_uniform_sweep(&rows, SweepLabel::Target)
}
