//! The JSON machine-file format.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::{validate_machine, Diagnostic, Machine, Rule};

/// A machine file exactly as written on disk, before validation.
///
/// ```json
/// { "name": "M", "tapes": 1, "states": ["S", "Y"], "alphabet": ["a"],
///   "start": "S", "finals": ["Y"], "accept": "Y",
///   "rules": [{ "from": "S", "read": ["_"], "to": "Y", "actions": ["_"] }] }
/// ```
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineFile {
    pub name: String,
    pub tapes: i64,
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub start: String,
    pub finals: Vec<String>,
    pub accept: String,
    pub rules: Vec<Rule>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("malformed machine file: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("invalid machine: {} problem(s)", .0.len())]
    Invalid(Vec<Diagnostic>),
}

impl MachineFile {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("machine files always serialize")
    }

    pub fn validate(&self) -> Result<Machine, Vec<Diagnostic>> {
        validate_machine(self)
    }
}

/// Parses and validates a machine file.
pub fn parse_machine(text: &str) -> Result<Machine, LoadError> {
    let raw = MachineFile::from_json(text)?;
    raw.validate().map_err(LoadError::Invalid)
}

/// Same as [`parse_machine`] for an already-decoded JSON value.
pub fn machine_from_value(value: serde_json::Value) -> Result<Machine, LoadError> {
    let raw: MachineFile = serde_json::from_value(value)?;
    raw.validate().map_err(LoadError::Invalid)
}
