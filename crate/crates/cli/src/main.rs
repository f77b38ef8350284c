mod error;
mod output;
mod scenario;
mod spec;

use std::fs::File;
use std::io::{self, BufWriter};
use std::process::ExitCode;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::Parser;

use error::CliError;
use spec::{Cli, ScenarioSpec};

fn run(cli: Cli) -> Result<(), CliError> {
    let (scenario, args) = cli.command.split();
    let spec = ScenarioSpec::resolve(scenario, args)?;
    let rows = scenario::run(&spec)?;
    match &spec.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            output::write_all(&mut BufWriter::new(file), &rows)
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => output::write_all(&mut io::stdout().lock(), &rows).context("writing to stdout")?,
    }
    eprintln!("{}: wrote {} rows", spec.scenario, rows.len());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::debug!("{e:?}");
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
