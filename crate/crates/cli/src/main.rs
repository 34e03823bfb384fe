use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use jacobi_outage_cli::{run, Cli, THREADS_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env = std::env::var(THREADS_ENV).ok();
    match run(&cli, env.as_deref()) {
        Ok((report, path)) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let written = match path {
                Some(p) => std::fs::write(&p, &report.body).map_err(|e| format!("{}: {e}", p.display())),
                None => std::io::stdout().write_all(report.body.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: cannot write output: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
