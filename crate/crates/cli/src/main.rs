mod args;
mod commands;
mod png;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};
use commands::{Ctx, Failure};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: thread pool: {e}");
        }
    }
    let ctx = Ctx {
        json: cli.json,
        quiet: cli.quiet,
        argv: std::env::args().collect(),
        started: Instant::now(),
    };
    let result = match &cli.command {
        Command::Analyze(a) => commands::analyze(a, &ctx),
        Command::Coeffs(a) => commands::coeffs(a, &ctx),
        Command::Amplitude(a) => commands::amplitude(a, &ctx),
        Command::Simulate(a) => commands::run_simulation(a, &ctx),
        Command::Spectrum(a) => commands::spectrum(a, &ctx),
        Command::Envelope(a) => commands::envelope(a, &ctx),
        Command::Corematch(a) => commands::corematch(a, &ctx),
        Command::Validate(a) => commands::validate(a, &ctx),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
