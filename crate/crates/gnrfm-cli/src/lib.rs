//! Library half of the `gnrfm` command-line tool.
//!
//! The binary in `main.rs` is a thin clap front end; everything it does lives
//! here so the integration tests can call the same code paths directly. The
//! split is:
//!
//! * [`io`] — CSV/PGM/JSON file formats (the only module that touches disk).
//! * [`commands`] — one function per subcommand (`gen`, `solve`, `cluster`,
//!   `eval`).
//! * [`bench`] — the benchmark sweep: experiment configs, seeded trials,
//!   result tables.
//!
//! Error handling contract: every failure is a [`CliError`], and the process
//! exit code is derived from it — `2` for usage/validation/file problems,
//! `3` when the solver itself fails numerically. Success is `0`.

pub mod bench;
pub mod commands;
pub mod io;

/// A failure with an exit code attached.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments, bad config, unreadable/unparsable files. Exit code 2.
    #[error("{0}")]
    Usage(String),
    /// The solver or a downstream kernel failed numerically. Exit code 3.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<gnrfm::Error> for CliError {
    fn from(e: gnrfm::Error) -> Self {
        match e {
            gnrfm::Error::Numerical(m) => CliError::Numerical(format!("numerical failure: {m}")),
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(CliError::usage("x").exit_code(), 2);
        assert_eq!(CliError::Numerical("x".into()).exit_code(), 3);
        let from_lib: CliError = gnrfm::Error::InvalidParameter("p".into()).into();
        assert_eq!(from_lib.exit_code(), 2);
        let from_lib: CliError = gnrfm::Error::DimensionMismatch("d".into()).into();
        assert_eq!(from_lib.exit_code(), 2);
        let from_lib: CliError = gnrfm::Error::Numerical("n".into()).into();
        assert_eq!(from_lib.exit_code(), 3);
    }
}
