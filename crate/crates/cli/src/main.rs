mod cli;
mod commands;
mod error;
mod output;
mod sweep;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use crate::cli::{expand_config, Cli, Command};
use crate::error::CliError;

fn write_output(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Specfun(args) => write_output(&commands::specfun(&args)?, None),
        Command::Eigen(args) => write_output(&commands::eigen(&args)?, args.common.out.as_deref()),
        Command::Torsion(args) => write_output(&commands::torsion(&args)?, args.common.out.as_deref()),
        Command::Gelfand(args) => write_output(&commands::gelfand(&args)?, args.common.out.as_deref()),
        Command::Sweep(args) => {
            let spec = sweep::SweepSpec::from_args(&args)?;
            let report = sweep::run(spec, args.jobs)?;
            write_output(&sweep::render(&report, args.common.format), args.common.out.as_deref())?;
            if report.failed_rows() == report.rows.len() {
                return Err(CliError::AllRowsFailed {
                    rows: report.rows.len(),
                });
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CAPSPEC_LOG", "warn"))
        .format_timestamp(None)
        .init();

    let args = match expand_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("capspec: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("capspec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
