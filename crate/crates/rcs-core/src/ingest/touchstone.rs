//! Touchstone v1 one-port (`.s1p`) reader and writer.
//!
//! Supported option line: `# <unit> S <RI|MA|DB> R <z0>`, tokens in any
//! order and case-insensitive, with the usual defaults (GHz, S, MA, 50 Ω).
//! Data rows hold `frequency value1 value2`. Comments start with `!`.

use num_complex::Complex64;

use super::{IngestError, GRID_UNIFORMITY_TOL};
use crate::sweep::{FrequencyGrid, FrequencySweep, SweepLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TsFormat {
    Ri,
    Ma,
    Db,
}

/// Parse a Touchstone v1 `.s1p` byte stream into a sweep.
///
/// Frequencies are converted to Hz and samples to real/imaginary form
/// regardless of the on-disk format. The frequency column must be strictly
/// increasing and uniform within [`GRID_UNIFORMITY_TOL`] (relative); the
/// returned sweep is snapped onto the exact uniform grid spanned by the
/// first and last frequencies. All parse failures carry 1-based line
/// numbers.
pub fn parse_touchstone_s1p(bytes: &[u8]) -> Result<FrequencySweep, IngestError> {
    let text = std::str::from_utf8(bytes).map_err(|e| IngestError::Parse {
        line: 0,
        message: format!("not valid utf-8: {e}"),
    })?;

    let mut format = None;
    let mut freq_mult = None;
    let mut rows: Vec<(usize, f64, Complex64)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('!') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if format.is_some() {
                return Err(IngestError::Parse {
                    line: line_no,
                    message: "duplicate option line".into(),
                });
            }
            let (f, m) = parse_option_line(rest, line_no)?;
            format = Some(f);
            freq_mult = Some(m);
            continue;
        }
        let (fmt, mult) = match (format, freq_mult) {
            (Some(f), Some(m)) => (f, m),
            _ => return Err(IngestError::MissingOptionLine),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(IngestError::Parse {
                line: line_no,
                message: format!("expected 3 columns (freq a b), got {}", fields.len()),
            });
        }
        let parse_f = |s: &str, what: &str| -> Result<f64, IngestError> {
            s.parse::<f64>().map_err(|_| IngestError::Parse {
                line: line_no,
                message: format!("unparseable {what}: {s:?}"),
            })
        };
        let f_hz = parse_f(fields[0], "frequency")? * mult;
        let a = parse_f(fields[1], "value")?;
        let b = parse_f(fields[2], "value")?;
        if let Some(&(_, prev, _)) = rows.last() {
            if f_hz <= prev {
                return Err(IngestError::NonMonotonic { line: line_no, f_hz });
            }
        }
        rows.push((line_no, f_hz, decode(fmt, a, b)));
    }

    if format.is_none() {
        return Err(IngestError::MissingOptionLine);
    }
    build_uniform_sweep(&rows, SweepLabel::Target)
}

fn parse_option_line(rest: &str, line_no: usize) -> Result<(TsFormat, f64), IngestError> {
    let mut format = TsFormat::Ma;
    let mut mult = 1e9;
    let mut tokens = rest.split_whitespace().peekable();
    while let Some(tok) = tokens.next() {
        match tok.to_ascii_uppercase().as_str() {
            "HZ" => mult = 1.0,
            "KHZ" => mult = 1e3,
            "MHZ" => mult = 1e6,
            "GHZ" => mult = 1e9,
            "RI" => format = TsFormat::Ri,
            "MA" => format = TsFormat::Ma,
            "DB" => format = TsFormat::Db,
            "S" => {}
            "R" => {
                // reference impedance value; accepted and ignored
                if let Some(z) = tokens.peek() {
                    if z.parse::<f64>().is_ok() {
                        tokens.next();
                    }
                }
            }
            other => {
                return Err(IngestError::Parse {
                    line: line_no,
                    message: format!(
                        "unsupported option token {other:?} (only 1-port S-parameters are handled)"
                    ),
                });
            }
        }
    }
    Ok((format, mult))
}

fn decode(fmt: TsFormat, a: f64, b: f64) -> Complex64 {
    match fmt {
        TsFormat::Ri => Complex64::new(a, b),
        TsFormat::Ma => Complex64::from_polar(a, b.to_radians()),
        TsFormat::Db => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
    }
}

/// Shared grid construction for file parsers: monotonicity was already
/// enforced row-by-row; this checks uniformity and snaps to the canonical
/// grid. Rows carry their source line number for error reporting.
pub(super) fn build_uniform_sweep(
    rows: &[(usize, f64, Complex64)],
    label: SweepLabel,
) -> Result<FrequencySweep, IngestError> {
    if rows.len() < 2 {
        return Err(IngestError::Parse {
            line: 0,
            message: format!("need at least 2 data rows, got {}", rows.len()),
        });
    }
    let grid = FrequencyGrid::new(rows[0].1, rows.last().unwrap().1, rows.len())?;
    for (i, &(line, f, _)) in rows.iter().enumerate() {
        let expected = grid.frequency_hz(i);
        let rel_err = (f - expected).abs() / expected.abs();
        if rel_err > GRID_UNIFORMITY_TOL {
            return Err(IngestError::NonUniformGrid {
                line,
                rel_err,
                tol: GRID_UNIFORMITY_TOL,
            });
        }
    }
    let samples = rows.iter().map(|&(_, _, s)| s).collect();
    Ok(FrequencySweep::new(grid, samples, label)?)
}

/// Write a sweep as Touchstone v1 (`# Hz S RI R 50`).
///
/// Values use Rust's shortest round-trip float formatting, so
/// parse(write(s)) reproduces the sweep bit-exactly.
pub fn write_touchstone_s1p(sweep: &FrequencySweep) -> String {
    let mut out = String::new();
    out.push_str("! 1-port S11 sweep\n");
    out.push_str(&format!("! scenario: {}\n", sweep.label()));
    out.push_str("# Hz S RI R 50\n");
    for (i, s) in sweep.samples().iter().enumerate() {
        out.push_str(&format!(
            "{} {} {}\n",
            sweep.grid().frequency_hz(i),
            s.re,
            s.im
        ));
    }
    out
}
