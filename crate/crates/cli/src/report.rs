//! The report envelope shared by every subcommand.

use cascade_core::Rational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Keys serialize in sorted order (`serde_json` maps are ordered), so equal
/// inputs give byte-identical reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub command: String,
    pub input_digest: String,
    pub results: Value,
    pub version: String,
}

impl AnalysisReport {
    pub fn new(command: &str, inputs: &[(String, Vec<u8>)], results: Value) -> Self {
        AnalysisReport {
            command: command.to_string(),
            input_digest: digest(inputs),
            results,
            version: VERSION.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut text = serde_json::to_string_pretty(&value).expect("report serializes");
        text.push('\n');
        text
    }
}

/// SHA-256 over each input's role and bytes, in the order given.
pub fn digest(inputs: &[(String, Vec<u8>)]) -> String {
    let mut h = Sha256::new();
    for (role, bytes) in inputs {
        h.update((role.len() as u64).to_le_bytes());
        h.update(role.as_bytes());
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex::encode(h.finalize())
}

/// `"p/q"` with the denominator always written.
pub fn fraction(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational(r: &Rational) -> Value {
    json!({
        "exact": fraction(r),
        "decimal": r.to_f64().unwrap_or(f64::NAN),
    })
}
