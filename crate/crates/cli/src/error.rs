use std::fmt;

use yona_core::Error;

/// Process exit codes.
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_FORMAT: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_GATE: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn format(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_FORMAT,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_IO,
            message: message.into(),
        }
    }

    pub fn gate(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_GATE,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidGeometry(_)
            | Error::InvalidArgument(_)
            | Error::UnsupportedAugmentation(_)
            | Error::Divergence { .. } => EXIT_USAGE,
            Error::UnsupportedFormat(_) | Error::Format { .. } | Error::CorruptRecord { .. } | Error::Png(_) => {
                EXIT_FORMAT
            }
            Error::Io { .. } => EXIT_IO,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
