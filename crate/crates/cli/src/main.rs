mod args;
mod commands;
mod error;
mod model;
mod output;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::EvolveRequest;
use error::{CliError, CliResult};
use model::build_model;
use verify::{describe, report, run_suite, select_points, worst, VerifyConfig};

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Spectrum { model, sector, output } => commands::spectrum(&build_model(&model)?, &sector, &output),
        Command::Eigvec { model, sector, output } => commands::eigvec(&build_model(&model)?, &sector, &output),
        Command::Weights { model, sector, normalized, output } => {
            commands::weights(&build_model(&model)?, &sector, normalized, &output)
        }
        Command::Evolve { model, sector, t_max, dt, state, observable, gnuplot, output } => {
            let req = EvolveRequest {
                sector: &sector,
                t_max,
                dt,
                state: state.as_deref(),
                observable: observable.as_deref(),
                gnuplot: gnuplot.as_ref(),
            };
            commands::evolve(&build_model(&model)?, &req, &output)
        }
        Command::Lift { model, n, n_max, output } => commands::lift(&build_model(&model)?, n, n_max, &output),
        Command::Verify { family, params, n_max, tol, inject_fault, output } => {
            if let Some(t) = tol {
                if !(t.is_finite() && t > 0.0) {
                    return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
                }
            }
            let cfg = VerifyConfig {
                points: select_points(&family, &params)?,
                n_max,
                tol,
                inject_fault,
                limits: convspec_core::Limits::from_env()?,
            };
            let outcomes = run_suite(&cfg)?;
            output::emit(&report(&outcomes), &output)?;
            let failed = outcomes.iter().filter(|o| !o.passed()).count();
            let worst = worst(&outcomes).map(describe).unwrap_or_else(|| "no checks".into());
            if failed > 0 {
                return Err(CliError::VerifyFailed(format!(
                    "{failed} of {} checks failed; worst offender: {worst}",
                    outcomes.len()
                )));
            }
            eprintln!("all {} checks passed; worst offender: {worst}", outcomes.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("convspec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
