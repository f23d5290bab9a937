use std::collections::BTreeMap;

use serde::Serialize;

/// Provenance block written into every output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub params: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub output: Option<String>,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: Vec::new(),
            params: BTreeMap::new(),
            seed: None,
            output: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn input(mut self, path: &str) -> Self {
        self.inputs.push(path.to_string());
        self
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn output(mut self, path: Option<&str>) -> Self {
        self.output = path.map(str::to_string);
        self
    }

    /// `{"manifest": ..., "result": ...}`, pretty-printed with a trailing newline.
    pub fn wrap_json(&self, result: serde_json::Value) -> String {
        let doc = serde_json::json!({ "manifest": self, "result": result });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }

    /// Prefixes a CSV body with one `# manifest: {...}` comment line.
    pub fn wrap_csv(&self, body: &str) -> String {
        let line = serde_json::to_string(self).expect("serializable");
        format!("# manifest: {line}\n{body}")
    }
}
