//! JSON reports.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Exhaustive enumeration or exact symbolic computation.
    Exhaustive,
    VerifiedOnSamples,
    /// Nothing was found up to the search bound; not a proof.
    InconclusiveAtBound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub property: String,
    /// `None` exactly when inconclusive.
    pub value: Option<bool>,
    pub provenance: Provenance,
}

impl Verdict {
    pub fn definite(property: &str, value: bool, provenance: Provenance) -> Self {
        Verdict {
            property: property.into(),
            value: Some(value),
            provenance,
        }
    }

    pub fn inconclusive(property: &str) -> Self {
        Verdict {
            property: property.into(),
            value: None,
            provenance: Provenance::InconclusiveAtBound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Vec<InputFile>,
    /// SHA-256 over the input digests in order.
    pub inputs_digest: String,
    pub parameters: Value,
    pub verdicts: Vec<Verdict>,
    pub result: Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Report {
    pub fn new(command: &str, inputs: Vec<InputFile>, parameters: Value) -> Self {
        let mut h = Sha256::new();
        for i in &inputs {
            h.update(i.sha256.as_bytes());
        }
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            inputs,
            inputs_digest: hex::encode(h.finalize()),
            parameters,
            verdicts: Vec::new(),
            result: Value::Null,
        }
    }

    /// 2 if any verdict is inconclusive, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.verdicts.iter().any(|v| v.value.is_none()) {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
