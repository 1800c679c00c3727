//! CLI error taxonomy mapped onto exit codes: 1 validation, 2 pipeline,
//! 3 i/o, 4 network.

use std::fmt;

use rcs_core::analysis::AnalysisError;
use rcs_core::geometry::GeometryError;
use rcs_core::ingest::IngestError;
use rcs_core::pipeline::PipelineError;
use rcs_core::synth::SynthError;
use rcs_core::vna::AcquireError;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Pipeline(String),
    Io(String),
    Network(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Pipeline(_) => 2,
            CliError::Io(_) => 3,
            CliError::Network(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m)
            | CliError::Pipeline(m)
            | CliError::Io(m)
            | CliError::Network(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        CliError::Pipeline(e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::Pipeline(e.to_string())
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<AcquireError> for CliError {
    fn from(e: AcquireError) -> Self {
        match e {
            AcquireError::InvalidEndpoint(m) => CliError::Validation(m),
            other => CliError::Network(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}
