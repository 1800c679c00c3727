//! Sweep acquisition from a VNA speaking SCPI over TCP, plus a scriptable
//! mock instrument for integration tests.
//!
//! The command subset is fixed: `SENSe:FREQuency:STARt/STOP`,
//! `SENSe:SWEep:POINts`, `SENSe:BANDwidth`, `SOURce:POWer`,
//! `INITiate:IMMediate`, and the query `CALCulate:DATA? SDATA` whose
//! response is one newline-terminated line of comma-separated ASCII
//! floats, real/imaginary interleaved.

pub mod mock;

pub use mock::{mock_server, FaultMode, MockServer};

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::Duration;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sweep::{FrequencyGrid, FrequencySweep, SweepError, SweepLabel};

#[derive(Debug, Error)]
pub enum AcquireError {
    #[error("invalid endpoint: {0}")]
    InvalidEndpoint(String),
    #[error("connect to {addr}: {source}")]
    Connect {
        addr: String,
        source: std::io::Error,
    },
    #[error("network timeout after {0} ms")]
    Timeout(u64),
    #[error("connection closed mid-transfer")]
    Disconnected,
    #[error("malformed response: token {token:?} at position {index}")]
    MalformedResponse { token: String, index: usize },
    #[error("point count mismatch: expected {expected}, got {got}")]
    PointCountMismatch { expected: usize, got: usize },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Sweep(#[from] SweepError),
}

/// Sweep setup pushed to the instrument before triggering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub f_start_hz: f64,
    pub f_stop_hz: f64,
    pub n_points: usize,
    pub if_bandwidth_hz: f64,
    pub power_dbm: f64,
}

impl SweepConfig {
    pub fn grid(&self) -> Result<FrequencyGrid, AcquireError> {
        FrequencyGrid::new(self.f_start_hz, self.f_stop_hz, self.n_points)
            .map_err(|e| AcquireError::InvalidEndpoint(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstrumentEndpoint {
    pub host: String,
    pub port: u16,
    pub timeout_ms: u64,
    pub sweep_config: SweepConfig,
}

impl InstrumentEndpoint {
    fn validate(&self) -> Result<(), AcquireError> {
        if self.port == 0 {
            return Err(AcquireError::InvalidEndpoint("port must be ≥ 1".into()));
        }
        if self.timeout_ms == 0 {
            return Err(AcquireError::InvalidEndpoint(
                "timeout_ms must be positive".into(),
            ));
        }
        if self.sweep_config.n_points < 2 {
            return Err(AcquireError::InvalidEndpoint(format!(
                "n_points must be ≥ 2, got {}",
                self.sweep_config.n_points
            )));
        }
        self.sweep_config.grid().map(|_| ())
    }
}

fn classify_io(e: std::io::Error, timeout_ms: u64) -> AcquireError {
    match e.kind() {
        std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut => {
            AcquireError::Timeout(timeout_ms)
        }
        std::io::ErrorKind::UnexpectedEof
        | std::io::ErrorKind::ConnectionReset
        | std::io::ErrorKind::ConnectionAborted
        | std::io::ErrorKind::BrokenPipe => AcquireError::Disconnected,
        _ => AcquireError::Io(e),
    }
}

/// Configure the instrument, trigger a single sweep, and read complex S11.
///
/// All-or-nothing: any fault yields an error and never a partial sweep.
/// The returned sweep passes the same validation as file-ingested ones.
pub fn acquire_sweep(endpoint: &InstrumentEndpoint) -> Result<FrequencySweep, AcquireError> {
    endpoint.validate()?;
    let cfg = &endpoint.sweep_config;
    let timeout = Duration::from_millis(endpoint.timeout_ms);
    let addr_str = format!("{}:{}", endpoint.host, endpoint.port);
    let addr = addr_str
        .to_socket_addrs()
        .map_err(|e| AcquireError::Connect {
            addr: addr_str.clone(),
            source: e,
        })?
        .next()
        .ok_or_else(|| AcquireError::InvalidEndpoint(format!("{addr_str} does not resolve")))?;
    let mut stream = TcpStream::connect_timeout(&addr, timeout).map_err(|e| {
        AcquireError::Connect {
            addr: addr_str.clone(),
            source: e,
        }
    })?;
    stream.set_read_timeout(Some(timeout))?;
    stream.set_write_timeout(Some(timeout))?;

    let commands = [
        format!("SENS:FREQ:STAR {}", cfg.f_start_hz),
        format!("SENS:FREQ:STOP {}", cfg.f_stop_hz),
        format!("SENS:SWE:POIN {}", cfg.n_points),
        format!("SENS:BAND {}", cfg.if_bandwidth_hz),
        format!("SOUR:POW {}", cfg.power_dbm),
        "INIT:IMM".to_string(),
        "CALC:DATA? SDATA".to_string(),
    ];
    for command in &commands {
        stream
            .write_all(format!("{command}\n").as_bytes())
            .map_err(|e| classify_io(e, endpoint.timeout_ms))?;
    }

    let mut reader = BufReader::new(&stream);
    let mut line = String::new();
    let n_read = reader
        .read_line(&mut line)
        .map_err(|e| classify_io(e, endpoint.timeout_ms))?;
    if n_read == 0 || !line.ends_with('\n') {
        return Err(AcquireError::Disconnected);
    }

    let mut values = Vec::with_capacity(2 * cfg.n_points);
    for (index, token) in line.trim().split(',').enumerate() {
        let v: f64 = token
            .trim()
            .parse()
            .map_err(|_| AcquireError::MalformedResponse {
                token: token.trim().to_string(),
                index,
            })?;
        values.push(v);
    }
    if values.len() != 2 * cfg.n_points {
        return Err(AcquireError::PointCountMismatch {
            expected: cfg.n_points,
            got: values.len() / 2,
        });
    }
    let samples: Vec<Complex64> = values
        .chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect();
    Ok(FrequencySweep::new(cfg.grid()?, samples, SweepLabel::Target)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::FrequencyGrid;

    fn scripted(n: usize) -> FrequencySweep {
        let grid = FrequencyGrid::new(10e9, 14e9, n).unwrap();
        let samples: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64 * 0.31).sin() * 0.01, (i as f64 * 0.17).cos() * 0.02))
            .collect();
        FrequencySweep::new(grid, samples, SweepLabel::Target).unwrap()
    }

    fn endpoint_for(server: &MockServer, sweep: &FrequencySweep, timeout_ms: u64) -> InstrumentEndpoint {
        InstrumentEndpoint {
            host: "127.0.0.1".into(),
            port: server.port(),
            timeout_ms,
            sweep_config: SweepConfig {
                f_start_hz: sweep.grid().f_start_hz(),
                f_stop_hz: sweep.grid().f_stop_hz(),
                n_points: sweep.grid().n_samples(),
                if_bandwidth_hz: 100e3,
                power_dbm: 0.0,
            },
        }
    }

    #[test]
    fn loopback_returns_scripted_sweep_exactly() {
        let sweep = scripted(64);
        let server = mock_server(vec![sweep.clone()], FaultMode::None).unwrap();
        let endpoint = endpoint_for(&server, &sweep, 2000);
        let got = acquire_sweep(&endpoint).unwrap();
        assert_eq!(got.grid(), sweep.grid());
        assert_eq!(got.samples(), sweep.samples());
        // a second acquisition over a fresh connection works too
        let again = acquire_sweep(&endpoint).unwrap();
        assert_eq!(again.samples(), sweep.samples());
        server.shutdown();
    }

    #[test]
    fn disconnect_mid_read_is_atomic() {
        let sweep = scripted(64);
        let server = mock_server(vec![sweep.clone()], FaultMode::Disconnect).unwrap();
        let endpoint = endpoint_for(&server, &sweep, 2000);
        match acquire_sweep(&endpoint) {
            Err(AcquireError::Disconnected) => {}
            other => panic!("expected Disconnected, got {other:?}"),
        }
        server.shutdown();
    }

    #[test]
    fn truncated_response_is_count_mismatch() {
        let sweep = scripted(64);
        let server = mock_server(vec![sweep.clone()], FaultMode::Truncate).unwrap();
        let endpoint = endpoint_for(&server, &sweep, 2000);
        match acquire_sweep(&endpoint) {
            Err(AcquireError::PointCountMismatch { expected, got }) => {
                assert_eq!(expected, 64);
                assert_eq!(got, 63);
            }
            other => panic!("expected PointCountMismatch, got {other:?}"),
        }
        server.shutdown();
    }

    #[test]
    fn garbage_token_is_named() {
        let sweep = scripted(16);
        let server = mock_server(vec![sweep.clone()], FaultMode::Garbage).unwrap();
        let endpoint = endpoint_for(&server, &sweep, 2000);
        match acquire_sweep(&endpoint) {
            Err(AcquireError::MalformedResponse { token, .. }) => {
                assert_eq!(token, "GARBAGE");
            }
            other => panic!("expected MalformedResponse, got {other:?}"),
        }
        server.shutdown();
    }

    #[test]
    fn delay_beyond_timeout_reports_timeout() {
        let sweep = scripted(16);
        let server = mock_server(
            vec![sweep.clone()],
            FaultMode::Delay(Duration::from_millis(400)),
        )
        .unwrap();
        let endpoint = endpoint_for(&server, &sweep, 50);
        match acquire_sweep(&endpoint) {
            Err(AcquireError::Timeout(50)) => {}
            other => panic!("expected Timeout, got {other:?}"),
        }
        server.shutdown();
    }

    #[test]
    fn endpoint_validation() {
        let sweep = scripted(16);
        let server = mock_server(vec![sweep.clone()], FaultMode::None).unwrap();
        let mut endpoint = endpoint_for(&server, &sweep, 1000);
        endpoint.sweep_config.n_points = 1;
        assert!(matches!(
            acquire_sweep(&endpoint),
            Err(AcquireError::InvalidEndpoint(_))
        ));
        let mut endpoint = endpoint_for(&server, &sweep, 1000);
        endpoint.timeout_ms = 0;
        assert!(matches!(
            acquire_sweep(&endpoint),
            Err(AcquireError::InvalidEndpoint(_))
        ));
        server.shutdown();
    }
}
