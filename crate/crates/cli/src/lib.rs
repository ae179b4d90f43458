//! Command-line front end and local HTTP session service for `trickcheck`.

mod args;
mod commands;
mod perform;
pub mod service;

use std::io::{self, BufRead, Write};

use thiserror::Error;
use trickcheck::ctl::FormulaError;
use trickcheck::dsl::DslError;
use trickcheck::oracle::OracleError;
use trickcheck::trick::{ExecError, PathError, ValidationError};

pub use args::{Cli, Command, TrickArgs};
pub use commands::{load_program, run};

/// Process exit status. Every invocation ends in one of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// The property holds, or the command simply succeeded.
    Holds = 0,
    /// The property fails (or the trick mismatches).
    Fails = 1,
    Error = 2,
    /// Input ended before the walkthrough finished.
    Aborted = 130,
}

impl Status {
    pub fn code(self) -> u8 {
        self as u8
    }

    fn from_bool(holds: bool) -> Self {
        if holds {
            Status::Holds
        } else {
            Status::Fails
        }
    }
}

/// Streams a command reads from and writes to.
pub struct Io<'a> {
    pub input: &'a mut dyn BufRead,
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Load { path: String, source: io::Error },
    #[error("{origin}: {source}")]
    Script { origin: String, source: DslError },
    #[error("{source}\n  {text}\n  {caret:>width$}", caret = "^", width = source.column)]
    Formula { text: String, source: FormulaError },
    #[error("invalid choice domain: {0}")]
    Domain(#[from] ValidationError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error("choice `{0}` has no legal value at this point")]
    NoLegalValue(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}
