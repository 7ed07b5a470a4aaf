//! Implementation of the `audiotact` command: offline tools plus the live
//! websocket session service.

pub mod commands;
pub mod protocol;
pub mod serve;

/// Process exit status of a command.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    /// The input was read but is not acceptable (invalid map, malformed log...).
    pub fn domain(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    /// The command could not be run as asked (unreadable file, bad flag value).
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::domain(format!("output failed: {e}"))
    }
}

pub type CmdResult = Result<(), Failure>;
