use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// Process exit status of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Validation,
    NotConverged,
    Precondition,
    Internal,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Self::Ok => 0,
            Self::Validation => 2,
            Self::NotConverged => 3,
            Self::Precondition => 4,
            Self::Internal => 5,
        }
    }

    /// The more severe of two statuses.
    pub fn max(self, other: Self) -> Self {
        if other.code() > self.code() {
            other
        } else {
            self
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub seed: u64,
    /// Wall-clock time; excluded from [`Report::payload`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub status: Status,
    pub results: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(cfg: &RunConfig, command: &str, status: Status, results: Value) -> Self {
        Self {
            command: command.to_string(),
            inputs_digest: inputs_digest(cfg),
            status,
            results,
            warnings: Vec::new(),
            error: None,
            provenance: Provenance {
                version: env!("CARGO_PKG_VERSION").to_string(),
                seed: cfg.seed,
                elapsed_ms: None,
            },
        }
    }

    pub fn with_elapsed(mut self, d: Duration) -> Self {
        self.provenance.elapsed_ms = Some(d.as_secs_f64() * 1e3);
        self
    }

    /// The report without timing, as pretty JSON. Identical inputs give
    /// identical bytes.
    pub fn payload(&self) -> String {
        let mut r = self.clone();
        r.provenance.elapsed_ms = None;
        serde_json::to_string_pretty(&r).expect("reports serialize")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// SHA-256 of the resolved configuration, output settings excluded.
pub fn inputs_digest(cfg: &RunConfig) -> String {
    let mut c = cfg.clone();
    c.output = Default::default();
    let json = serde_json::to_vec(&c).expect("configs serialize");
    hex::encode(Sha256::digest(&json))
}
