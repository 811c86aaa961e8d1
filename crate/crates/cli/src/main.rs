use std::process::ExitCode;

use clap::Parser;
use formlap_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = std::time::Instant::now();
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            for a in &outcome.artifacts {
                eprintln!("wrote {}", a.display());
            }
            eprintln!("wall time {:.3} s", started.elapsed().as_secs_f64());
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
