//! The JSON report printed by every command.

use std::collections::BTreeMap;

use nlmp_core::model::{Location, PreimageWitness, Severity, ValidationReport};
use nlmp_core::rational::format_rational;
use nlmp_core::{Error, Measure, Nlmp, Partition, SigmaAlgebra, StateSet};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const INVALID_MODEL: i32 = 2;
    pub const INVARIANT: i32 = 3;
    pub const UNSATISFIED: i32 = 4;
    pub const EQUIVALENT: i32 = 5;
    pub const UNSUPPORTED: i32 = 6;
}

#[derive(Debug, Clone, Serialize)]
pub struct CommandEcho {
    pub name: String,
    pub model: String,
    pub options: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl From<&Error> for ErrorInfo {
    fn from(e: &Error) -> Self {
        let (kind, message, line, column) = match e {
            Error::Domain(m) => ("domain", m.clone(), None, None),
            Error::Precondition(m) => ("precondition", m.clone(), None, None),
            Error::Unsupported(m) => ("unsupported", m.clone(), None, None),
            Error::Parse {
                line,
                column,
                message,
            } => ("parse", message.clone(), Some(*line), Some(*column)),
        };
        ErrorInfo {
            kind,
            message,
            line,
            column,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonReport {
    pub command: CommandEcho,
    /// `sha256:<hex>` of the model file bytes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_digest: Option<String>,
    pub status: &'static str,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    /// Wall-clock time; the only field that varies between identical runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl JsonReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }
}

pub fn status_of(code: i32) -> &'static str {
    match code {
        exit::OK => "ok",
        exit::USAGE => "usage-error",
        exit::INVALID_MODEL => "invalid-model",
        exit::INVARIANT => "invariant-violation",
        exit::UNSATISFIED => "unsatisfied",
        exit::EQUIVALENT => "equivalent",
        _ => "unsupported",
    }
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

/// State names of a set, sorted.
pub fn set_names(m: &Nlmp, set: &StateSet) -> Vec<String> {
    let mut names: Vec<String> = set
        .iter()
        .map(|s| m.universe().name(s).to_string())
        .collect();
    names.sort();
    names
}

/// Blocks as sorted name lists, in lexicographic order.
pub fn partition_names(m: &Nlmp, p: &Partition) -> Vec<Vec<String>> {
    let mut blocks: Vec<Vec<String>> = (0..p.len())
        .map(|b| set_names(m, &p.block_set(b)))
        .collect();
    blocks.sort();
    blocks
}

pub fn sigma_atoms(m: &Nlmp, sigma: &SigmaAlgebra) -> Vec<Vec<String>> {
    partition_names(m, sigma.atoms())
}

/// A measure as `{atom}:weight` terms over its support.
pub fn measure_text(m: &Nlmp, mu: &Measure) -> String {
    let sigma = mu.sigma();
    let mut terms: Vec<(Vec<String>, String)> = mu
        .weights()
        .iter()
        .enumerate()
        .filter(|(_, w)| **w != nlmp_core::rational::zero())
        .map(|(a, w)| (set_names(m, &sigma.atom_set(a)), format_rational(w)))
        .collect();
    terms.sort();
    terms
        .into_iter()
        .map(|(atom, w)| format!("{{{}}}:{w}", atom.join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessJson {
    pub label: String,
    pub measures: Vec<String>,
    pub preimage: Vec<String>,
}

pub fn preimage_witness(m: &Nlmp, w: &PreimageWitness) -> WitnessJson {
    let mut measures: Vec<String> =
        w.xi.iter()
            .map(|&i| measure_text(m, m.pool().get(i)))
            .collect();
    measures.sort();
    WitnessJson {
        label: m.labels()[w.label].clone(),
        measures,
        preimage: set_names(m, &w.preimage),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FindingJson {
    pub severity: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
}

pub fn findings(m: &Nlmp, report: &ValidationReport) -> Vec<FindingJson> {
    report
        .findings
        .iter()
        .map(|f| FindingJson {
            severity: match f.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            },
            message: f.message.clone(),
            witness: match &f.location {
                Location::Preimage(w) => Some(preimage_witness(m, w)),
                _ => None,
            },
        })
        .collect()
}
