//! CLI error taxonomy: every failure is either an I/O problem (exit 2) or a
//! validation/model problem (exit 1), rendered as one JSON object on stderr
//! so scripts can parse failures without scraping prose.

use std::path::Path;

use shiftcal::calibrators::CalibratorError;
use shiftcal::dataset::DatasetError;
use shiftcal::diagnostics::DiagnosticsError;
use shiftcal::metrics::MetricsError;
use shiftcal::synth::SynthError;

#[derive(Debug)]
pub enum CliError {
    Io { message: String },
    Validation { message: String },
}

impl CliError {
    pub fn io(message: impl Into<String>) -> Self {
        CliError::Io {
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        CliError::Validation {
            message: message.into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Validation { .. } => "validation",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Io { message } | CliError::Validation { message } => message,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 2,
            CliError::Validation { .. } => 1,
        }
    }

    /// The machine-readable stderr line.
    pub fn to_stderr_json(&self) -> String {
        serde_json::json!({
            "error": { "kind": self.kind(), "message": self.message() }
        })
        .to_string()
    }

    /// Prefixes the message with the file it concerns.
    pub fn at(self, path: &Path) -> Self {
        let tag = |message: String| format!("{}: {}", path.display(), message);
        match self {
            CliError::Io { message } => CliError::Io {
                message: tag(message),
            },
            CliError::Validation { message } => CliError::Validation {
                message: tag(message),
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::Io(io) => CliError::io(io.to_string()),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::Dataset(d) => d.into(),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<CalibratorError> for CliError {
    fn from(e: CalibratorError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<DiagnosticsError> for CliError {
    fn from(e: DiagnosticsError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            CliError::io(e.to_string())
        } else {
            CliError::validation(e.to_string())
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<toml::de::Error> for CliError {
    fn from(e: toml::de::Error) -> Self {
        CliError::validation(e.to_string())
    }
}

/// `std::fs::read_to_string` with the path in the error.
pub fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::from(e).at(path))
}

/// `std::fs::write` with the path in the error.
pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::from(e).at(path))
}
