use std::process::ExitCode;

use clap::Parser;

mod commands;
mod config;
mod output;

/// Why a run stopped short, mapped onto the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config or preconditions: exit 1.
    Config(String),
    /// An estimator had nothing to work with: exit 2.
    Degenerate(String),
    /// A proven bound was violated; the report is still written: exit 3.
    Violation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Degenerate(_) => 2,
            Failure::Violation(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = match config::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = config::resolve(cli).and_then(|cfg| commands::run(&cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Config(m) => eprintln!("error: {m}\n\nRun `sticks --help` for usage."),
                Failure::Degenerate(m) => eprintln!("degenerate estimate: {m}"),
                Failure::Violation(m) => eprintln!("bound violated: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
