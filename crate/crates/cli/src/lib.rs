//! Command-line orchestration for solvaq: config parsing, pipeline wiring,
//! reports and the shot-count sweep.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{
    cmd_casci, cmd_scf, cmd_sqd, cmd_sweep, run, write_outputs, write_sweep_csv, Command, Outcome, SWEEP_HEADER,
};
pub use config::RunConfig;
pub use report::RunReport;

/// Process exit status for a completed run.
pub const EXIT_OK: i32 = 0;
/// A solver did not converge.
pub const EXIT_NOT_CONVERGED: i32 = 1;
/// Bad configuration, missing file or an unsupported request.
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("not converged: {0}")]
    NotConverged(String),
}

/// Maps an error chain onto the exit-code contract.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CliError>() {
            return match e {
                CliError::Config(_) => EXIT_CONFIG,
                CliError::NotConverged(_) => EXIT_NOT_CONVERGED,
            };
        }
        if let Some(e) = cause.downcast_ref::<solvaq::Error>() {
            use solvaq::Error as E;
            return match e {
                E::Stagnation { .. } | E::LinearAlgebra(_) | E::SingularSystem { .. } => EXIT_NOT_CONVERGED,
                _ => EXIT_CONFIG,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() || cause.downcast_ref::<csv::Error>().is_some() {
            return EXIT_CONFIG;
        }
    }
    EXIT_CONFIG
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        let stagnation = anyhow::Error::new(solvaq::Error::Stagnation { iterations: 50, residual: 1e-3 });
        assert_eq!(exit_code(&stagnation), EXIT_NOT_CONVERGED);
        let capacity = anyhow::Error::new(solvaq::Error::Capacity { what: "D", value: 2, limit: 1 });
        assert_eq!(exit_code(&capacity), EXIT_CONFIG);
        let wrapped = anyhow::Error::new(CliError::NotConverged("scf".into())).context("running scf");
        assert_eq!(exit_code(&wrapped), EXIT_NOT_CONVERGED);
        assert_eq!(exit_code(&anyhow::anyhow!("other")), EXIT_CONFIG);
    }
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
