// Copyright 2026 homog contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors produced by state construction, circuit simulation, pulse design
/// and file handling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator size exceeds the {max_qubits}-qubit cap ({dim} x {dim})")]
    SizeCap { dim: usize, max_qubits: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("matrix is not a valid {kind}: {detail}")]
    InvalidMatrix { kind: &'static str, detail: String },

    #[error("schedule validation failed: {0}")]
    ScheduleValidation(String),

    #[error("spin-system config error: {0}")]
    SpinConfig(String),

    #[error("pulse file error: {0}")]
    PulseFile(String),

    #[error("missing pulse for gate `{gate}` (eta = {eta_deg} deg)")]
    MissingPulse { gate: String, eta_deg: f64 },

    #[error("normalisation error: {0}")]
    Normalisation(String),

    #[error("record format error: {0}")]
    RecordFormat(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
