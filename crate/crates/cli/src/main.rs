//! `netgrowth` command-line tool.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::commands::{Cli, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            let code = if err.use_stderr() { 1 } else { 0 };
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("netgrowth: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// 1 usage, 2 data error, 3 numerical failure.
fn exit_code(err: &CliError) -> u8 {
    use netgrowth::Error as E;
    match err {
        CliError::Usage(_) => 1,
        CliError::Data(_) | CliError::Io { .. } => 2,
        CliError::Core(e) => match e {
            E::InvalidParameter(_) => 1,
            E::NoConvergence { .. } | E::Degenerate(_) => 3,
            _ => 2,
        },
    }
}
