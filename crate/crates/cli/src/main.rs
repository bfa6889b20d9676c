use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use evstruct::enumeration::Limits;
use evstruct_cli::app::{reason_json, verdict_json};
use evstruct_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Limits::from_env()
        .map_err(CliError::from)
        .and_then(|limits| run(cli, &limits, &mut io::stdout().lock()));
    match result {
        Ok(outcome) => {
            if !outcome.stdout.is_empty() {
                println!("{}", outcome.stdout.trim_end());
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            let detail = match &e {
                CliError::Invalid(v) => Some(verdict_json(v)),
                CliError::NotFullGraph(r) => Some(reason_json(Some(r))),
                _ => None,
            };
            if let Some(d) = detail {
                println!("{}", serde_json::to_string_pretty(&d).unwrap_or_default());
            }
            let _ = writeln!(io::stderr(), "error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
