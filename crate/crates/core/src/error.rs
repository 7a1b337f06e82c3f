// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised while reading a benchmark description.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate core id {id}")]
    DuplicateCoreId { line: usize, id: u32 },
    #[error("line {line}: core {id} has non-positive pattern count")]
    NonPositivePatterns { line: usize, id: u32 },
    #[error("line {line}: negative value for `{field}`")]
    NegativeCount { line: usize, field: String },
    #[error("line {line}: unknown directive `{directive}`")]
    UnknownDirective { line: usize, directive: String },
    #[error("invalid soc: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

/// Errors raised by the wrapper, rectangle and scheduling stages.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TamError {
    #[error("TAM width must be at least 1 (got {0})")]
    ZeroWidth(u32),
    #[error("no rectangle sets given")]
    EmptyInput,
    #[error("core {core} draws {power} mW which exceeds the power limit of {limit} mW")]
    Unschedulable { core: u32, power: f64, limit: f64 },
    #[error("core {0} has no power value but a power limit is in force")]
    MissingPower(u32),
    #[error("unknown core id {0}")]
    UnknownCore(u32),
    #[error("invalid soc: {}", .0.join("; "))]
    InvalidSoc(Vec<String>),
    #[error("scheduler stalled at t={0} with work remaining")]
    Stalled(u64),
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
}
