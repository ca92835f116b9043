use std::fmt;

use kpz_lab::Error as LabError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CERTIFICATE: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Lab(LabError),
    Io(String),
    SelftestFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Lab(e) => match e {
                LabError::InvalidInput(_) | LabError::OutOfRange(_) => EXIT_VALIDATION,
                LabError::Resource(_) => EXIT_RESOURCE,
                LabError::Certificate { .. }
                | LabError::Pole(_)
                | LabError::Singular
                | LabError::BlowUp(_)
                | LabError::Kernel { .. } => EXIT_CERTIFICATE,
            },
            CliError::Io(_) | CliError::SelftestFailed(_) => EXIT_FAILURE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Lab(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::SelftestFailed(n) => write!(f, "{n} self-test check(s) failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        CliError::Lab(e)
    }
}

pub fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}
