use std::fmt;

use polycurve::Error;

/// Command failure, split by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad input or unsupported request (exit 2).
    Usage(String),
    /// A numerical precondition or tolerance was not met (exit 1).
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Numerical(_) => 1,
            Failure::Usage(_) => 2,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::StepUnderflow(_)
            | Error::NotHarmonic(_)
            | Error::DegenerateCurve(_)
            | Error::ZeroVector
            | Error::StencilTooCoarse { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(format!("malformed JSON: {e}"))
    }
}

pub type CmdResult<T> = std::result::Result<T, Failure>;
