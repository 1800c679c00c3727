//! Mock SCPI instrument: serves scripted sweeps over a local TCP port and
//! injects faults on demand. Handles one connection at a time, which is
//! all the tests need.

use std::io::{BufRead, BufReader, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::Duration;

use crate::sweep::FrequencySweep;

/// Fault injected into the data response.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultMode {
    None,
    /// Close the socket halfway through the data line.
    Disconnect,
    /// Send one point fewer than scripted, as a complete line.
    Truncate,
    /// Replace a data token with a non-numeric string.
    Garbage,
    /// Sleep before answering the data query.
    Delay(Duration),
}

/// Running mock instrument; shuts down when dropped.
#[derive(Debug)]
pub struct MockServer {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl MockServer {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn port(&self) -> u16 {
        self.addr.port()
    }

    pub fn shutdown(mut self) {
        self.stop_and_join();
    }

    fn stop_and_join(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.stop_and_join();
    }
}

/// Bind a local port and serve the scripted sweeps (round-robin per data
/// query) with the requested fault mode.
pub fn mock_server(
    sweeps: Vec<FrequencySweep>,
    fault: FaultMode,
) -> std::io::Result<MockServer> {
    if sweeps.is_empty() {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "need at least one scripted sweep",
        ));
    }
    let listener = TcpListener::bind(("127.0.0.1", 0))?;
    listener.set_nonblocking(true)?;
    let addr = listener.local_addr()?;
    let stop = Arc::new(AtomicBool::new(false));
    let stop_thread = Arc::clone(&stop);
    let handle = std::thread::spawn(move || {
        let next = AtomicUsize::new(0);
        while !stop_thread.load(Ordering::SeqCst) {
            match listener.accept() {
                Ok((stream, _)) => {
                    let _ = serve_connection(stream, &sweeps, &next, fault);
                }
                Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                    std::thread::sleep(Duration::from_millis(2));
                }
                Err(_) => break,
            }
        }
    });
    Ok(MockServer {
        addr,
        stop,
        handle: Some(handle),
    })
}

fn serve_connection(
    stream: TcpStream,
    sweeps: &[FrequencySweep],
    next: &AtomicUsize,
    fault: FaultMode,
) -> std::io::Result<()> {
    stream.set_nonblocking(false)?;
    stream.set_read_timeout(Some(Duration::from_secs(2)))?;
    let mut writer = stream.try_clone()?;
    let mut reader = BufReader::new(stream);
    let mut line = String::new();
    loop {
        line.clear();
        match reader.read_line(&mut line) {
            Ok(0) => return Ok(()), // client hung up
            Ok(_) => {}
            Err(_) => return Ok(()),
        }
        let command = line.trim().to_ascii_uppercase();
        if command.starts_with("CALC:DATA?") || command.starts_with("CALCULATE:DATA?") {
            let index = next.fetch_add(1, Ordering::SeqCst) % sweeps.len();
            if respond_data(&mut writer, &sweeps[index], fault)? {
                return Ok(()); // fault closed the connection
            }
        }
        // set commands and INIT produce no response in this dialect
    }
}

/// Write the data response, applying the fault. Returns true when the
/// connection was deliberately cut.
fn respond_data(
    writer: &mut TcpStream,
    sweep: &FrequencySweep,
    fault: FaultMode,
) -> std::io::Result<bool> {
    if let FaultMode::Delay(d) = fault {
        std::thread::sleep(d);
    }
    let mut tokens: Vec<String> = Vec::with_capacity(2 * sweep.len());
    for s in sweep.samples() {
        tokens.push(format!("{}", s.re));
        tokens.push(format!("{}", s.im));
    }
    match fault {
        FaultMode::Truncate => {
            tokens.truncate(tokens.len() - 2);
        }
        FaultMode::Garbage => {
            let mid = tokens.len() / 2;
            tokens[mid] = "GARBAGE".to_string();
        }
        _ => {}
    }
    let line = tokens.join(",");
    if fault == FaultMode::Disconnect {
        let half = line.len() / 2;
        writer.write_all(line[..half].as_bytes())?;
        writer.flush()?;
        writer.shutdown(Shutdown::Both)?;
        return Ok(true);
    }
    writer.write_all(line.as_bytes())?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(false)
}
