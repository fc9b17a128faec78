//! JSON certificate bundles for the experiments, and their verifier.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lab::{NonEngulfedStage, ResfinCertificate, SubgpsepCertificate};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Resfin(Box<ResfinCertificate>),
    Subgpsep(Box<SubgpsepCertificate>),
    Nonengulfed(Box<NonEngulfedStage>),
}

impl Certificate {
    /// Recomputes every check from the stored data, without searching.
    pub fn checks(&self) -> Result<Vec<Check>> {
        match self {
            Certificate::Resfin(c) => c.checks(),
            Certificate::Subgpsep(c) => c.checks(),
            Certificate::Nonengulfed(c) => c.checks(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub experiment: String,
    pub seed: u64,
    pub note: String,
    pub inputs: serde_json::Value,
    pub certificate: Certificate,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(
        experiment: &str,
        seed: u64,
        note: &str,
        inputs: serde_json::Value,
        certificate: Certificate,
    ) -> Result<Self> {
        let checks = certificate.checks()?;
        Ok(Report {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.to_string(),
            seed,
            note: note.to_string(),
            inputs,
            certificate,
            checks,
        })
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Report =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("report JSON: {e}")))?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(format!(
                "unsupported schema version {}",
                r.schema_version
            )));
        }
        Ok(r)
    }
}

/// Outcome of replaying a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub schema_version: u32,
    pub experiment: String,
    pub checks: Vec<Check>,
    /// The replayed checks agree with the recorded ones.
    pub consistent: bool,
    pub valid: bool,
}

pub fn verify(report: &Report) -> Result<Verification> {
    let checks = report.certificate.checks()?;
    let recorded: Vec<(&str, bool)> = report.checks.iter().map(|c| (c.name.as_str(), c.pass)).collect();
    let replayed: Vec<(&str, bool)> = checks.iter().map(|c| (c.name.as_str(), c.pass)).collect();
    let consistent = recorded == replayed;
    Ok(Verification {
        schema_version: SCHEMA_VERSION,
        experiment: report.experiment.clone(),
        valid: consistent && checks.iter().all(|c| c.pass),
        checks,
        consistent,
    })
}

/// Wraps a stand-alone certificate with a schema version and kind tag.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema_version: u32,
    pub kind: String,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Envelope<T> {
    pub fn new(kind: &str, body: T) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION,
            kind: kind.to_string(),
            body,
        }
    }
}
