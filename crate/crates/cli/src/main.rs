use std::process::ExitCode;

use clap::Parser;

/// Thread-count hint for the worker pool.
const THREADS_VAR: &str = "CACTL_THREADS";

fn main() -> ExitCode {
    let cli = cactl::Cli::parse();
    if let Some(threads) = std::env::var(THREADS_VAR).ok().and_then(|v| v.parse().ok()) {
        // only fails if a pool was already built
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match cactl::run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
