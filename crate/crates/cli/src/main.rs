use std::io;
use std::process::ExitCode;

use clap::Parser;
use trickcheck_cli::{run, Cli, Io};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let mut out = io::stdout().lock();
    let mut err = io::stderr().lock();
    let status = run(cli, &mut Io { input: &mut input, out: &mut out, err: &mut err });
    ExitCode::from(status.code())
}
