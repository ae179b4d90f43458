use std::net::IpAddr;

use clap::{Args, Parser, Subcommand};
use trickcheck::{ExecConfig, SlotMode};

#[derive(Debug, Parser)]
#[command(name = "trickcheck", version, about = "Model-check card tricks over every combination of audience choices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a branching-time formula over every path.
    Check {
        #[command(flatten)]
        trick: TrickArgs,
        /// Formula over `p` and `empty`, e.g. "AF (p & empty)".
        #[arg(long)]
        formula: String,
        #[arg(long)]
        json: bool,
    },
    /// List every choice binding with its final answer.
    Enumerate {
        #[command(flatten)]
        trick: TrickArgs,
        #[arg(long)]
        json: bool,
    },
    /// Run the flag-counting oracle for the five standard properties and
    /// compare it with the checker.
    Oracle {
        #[command(flatten)]
        trick: TrickArgs,
        #[arg(long)]
        json: bool,
    },
    /// Walk through the trick interactively, reading choices from stdin.
    Perform {
        #[command(flatten)]
        trick: TrickArgs,
        /// Print the path record as JSON; the transcript goes to stderr.
        #[arg(long)]
        json: bool,
    },
    /// Print the trick as canonical script text.
    Print {
        #[command(flatten)]
        trick: TrickArgs,
    },
    /// Print the automaton of all action words in the JSON exchange format.
    Automaton {
        #[command(flatten)]
        trick: TrickArgs,
    },
    /// Serve the HTTP session API.
    Serve {
        #[command(flatten)]
        trick: TrickArgs,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
}

#[derive(Debug, Clone, Args)]
pub struct TrickArgs {
    /// Path to a .trick script, or `builtin`.
    #[arg(long, default_value = "builtin")]
    pub trick: String,
    #[arg(long, default_value = "internal_gaps")]
    pub slot_mode: SlotMode,
    /// Domain of the name-length choice, e.g. `2,3,4`.
    #[arg(long, value_delimiter = ',')]
    pub name_words: Option<Vec<u32>>,
    /// Reserved; nothing is random.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl TrickArgs {
    pub fn config(&self) -> ExecConfig {
        ExecConfig { slot_mode: self.slot_mode }
    }
}

impl Command {
    pub fn trick(&self) -> &TrickArgs {
        match self {
            Command::Check { trick, .. }
            | Command::Enumerate { trick, .. }
            | Command::Oracle { trick, .. }
            | Command::Perform { trick, .. }
            | Command::Print { trick }
            | Command::Automaton { trick }
            | Command::Serve { trick, .. } => trick,
        }
    }
}
