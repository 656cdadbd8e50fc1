use std::process::ExitCode;

use clap::Parser;
use nonlocal_periodic::cli::{error_document, run, JobConfig};

fn main() -> ExitCode {
    let config = JobConfig::parse();
    match run(&config) {
        Ok(outcome) if outcome.ok => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(err) => {
            let doc = error_document(&err);
            let text = nonlocal_periodic::json::to_string(&doc)
                .unwrap_or_else(|_| format!("{{\"error\": \"{}\"}}\n", err.kind()));
            print!("{text}");
            ExitCode::from(2)
        }
    }
}
