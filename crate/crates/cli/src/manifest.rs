//! Run manifests: a small JSON record written next to every output file,
//! capturing the resolved invocation so the output can be reproduced.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub tool_version: String,
    pub subcommand: String,
    /// Resolved flag values, after defaults and the environment were applied.
    pub args: BTreeMap<String, String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> RunManifest {
        RunManifest {
            format_version: snaplab_core::trace::FORMAT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            args: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed: None,
        }
    }

    pub fn arg(mut self, key: &str, value: impl ToString) -> RunManifest {
        self.args.insert(key.to_string(), value.to_string());
        self
    }

    pub fn arg_opt(self, key: &str, value: Option<impl ToString>) -> RunManifest {
        match value {
            Some(v) => self.arg(key, v),
            None => self,
        }
    }

    pub fn input(mut self, path: &Path) -> RunManifest {
        self.inputs.push(path.display().to_string());
        self
    }

    pub fn output(mut self, path: &Path) -> RunManifest {
        self.outputs.push(path.display().to_string());
        self
    }

    pub fn seed(mut self, seed: u64) -> RunManifest {
        self.seed = Some(seed);
        self
    }

    /// The manifest's own path for a given output file.
    pub fn path_for(out: &Path) -> PathBuf {
        let mut name = out.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        out.with_file_name(name)
    }

    pub fn write_alongside(&self, out: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(Self::path_for(out), text + "\n")
    }
}
