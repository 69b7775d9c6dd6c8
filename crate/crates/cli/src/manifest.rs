use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::io::{display, read_text, sibling, write_json};

/// Record written next to every command's primary output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    /// Arguments after the program name; `replay` parses these again.
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub config: serde_json::Value,
}

impl RunManifest {
    pub fn new(command: &str, args: &[String], config: &impl Serialize) -> anyhow::Result<Self> {
        Ok(RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            args: args.to_vec(),
            seed: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            config: serde_json::to_value(config)?,
        })
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.inputs.push(display(path));
        self
    }

    pub fn output(mut self, path: &Path) -> Self {
        self.outputs.push(display(path));
        self
    }

    /// Writes `<stem>.manifest.json` beside `primary`.
    pub fn write_beside(&self, primary: &Path) -> anyhow::Result<PathBuf> {
        let path = sibling(primary, "manifest.json");
        write_json(&path, self)?;
        Ok(path)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(&read_text(path)?)?)
    }
}
