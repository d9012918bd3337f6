use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::Parser;

use tautchern_cli::request::Cli;
use tautchern_cli::{execute_with_threads, render_output, threads_from_env, CliError, ComputationRequest};

fn run() -> anyhow::Result<i32> {
    let cli = Cli::parse();
    let cfg = cli.config()?;
    let req = ComputationRequest::from_config(&cfg)?;
    let threads = threads_from_env()?;
    let start = Instant::now();
    let doc = execute_with_threads(&req, threads)?;
    let bytes = render_output(&doc, req.format);
    match &cli.out {
        Some(path) => std::fs::write(path, &bytes).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(bytes.as_bytes())?,
    }
    eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    Ok(doc.exit_code())
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<CliError>().map_or(1, CliError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
