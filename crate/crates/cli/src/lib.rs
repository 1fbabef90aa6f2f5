//! Configuration, dispatch and report writing for the `transnum` binary.

pub mod commands;
pub mod config;
pub mod output;
pub mod report;
pub mod sweep;

use std::time::Instant;

use serde_json::Value;

pub use config::{Command, OutputFormat, Overrides, RunConfig};
pub use report::{Report, Status};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] transnum::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        Self::Validation(msg.into())
    }

    pub fn status(&self) -> Status {
        use transnum::Error as E;
        match self {
            Self::Validation(_) => Status::Validation,
            Self::Io(_) => Status::Internal,
            Self::Core(e) => match e {
                E::DimensionMismatch { .. }
                | E::InvalidClass(_)
                | E::InvalidMatrix(_)
                | E::InvalidMeasure(_)
                | E::InvalidParameter(_)
                | E::InvalidSeifert(_)
                | E::Config(_) => Status::Validation,
                E::NotConverged { .. } => Status::NotConverged,
                E::ClassNotPreserved { .. }
                | E::NotPeriodic { .. }
                | E::NonIntegralDisplacement { .. }
                | E::NonInvariantMeasure { .. }
                | E::NoInverse(_)
                | E::MissingLipschitz(_)
                | E::BallCapExceeded { .. }
                | E::NonzeroEuler { .. } => Status::Precondition,
                E::Internal(_) => Status::Internal,
            },
        }
    }

    pub fn kind(&self) -> String {
        match self {
            Self::Validation(_) => "validation".into(),
            Self::Io(_) => "io".into(),
            Self::Core(e) => {
                let dbg = format!("{e:?}");
                dbg.split([' ', '(', '{'])
                    .next()
                    .unwrap_or("error")
                    .to_string()
            }
        }
    }
}

/// Execute a resolved configuration. Failures are folded into the report.
pub fn run(cfg: &RunConfig) -> Report {
    let start = Instant::now();
    let name = cfg.command.map_or("unknown", Command::name);
    let report = match commands::execute(cfg) {
        Ok(out) => {
            let mut r = Report::new(cfg, name, out.status, out.results);
            r.warnings = out.warnings;
            r
        }
        Err(e) => {
            let mut r = Report::new(cfg, name, e.status(), Value::Null);
            r.error = Some(report::ErrorRecord {
                kind: e.kind(),
                message: e.to_string(),
            });
            r
        }
    };
    report.with_elapsed(start.elapsed())
}
