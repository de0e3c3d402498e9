//! JSON run reports.

use serde::Serialize;
use serde_json::{Map, Value};

/// One command's inputs, results and timing. Absent fields are omitted from
/// the JSON output.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Inputs,
    pub result: Map<String, Value>,
    pub wall_seconds: f64,
    pub workers: usize,
    pub mem_bytes: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Inputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampler: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub keep: Option<usize>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            ..Default::default()
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.result.insert(key.to_string(), value.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports contain only finite-or-null numbers and strings")
    }
}

/// `{"error": ..., "command": ...}` for failed runs.
pub fn error_json(command: Option<&str>, message: &str) -> String {
    let mut m = Map::new();
    m.insert("error".into(), Value::from(message));
    if let Some(c) = command {
        m.insert("command".into(), Value::from(c));
    }
    Value::Object(m).to_string()
}
