//! Run metadata written next to every artifact. Kept out of the artifact
//! itself so that artifacts stay byte-identical between runs.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub struct RunMetadata {
    started: Instant,
    command_line: Vec<String>,
    config: Map<String, Value>,
    outputs: Vec<(PathBuf, String)>,
}

impl RunMetadata {
    pub fn start() -> Self {
        RunMetadata {
            started: Instant::now(),
            command_line: std::env::args().collect(),
            config: Map::new(),
            outputs: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.config.insert(key.to_string(), value.into());
    }

    /// Writes `contents` to `path` and records its checksum.
    pub fn write_output(&mut self, path: &Path, contents: &[u8]) -> std::io::Result<()> {
        std::fs::write(path, contents)?;
        self.outputs.push((path.to_path_buf(), checksum(contents)));
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let outputs: Map<String, Value> = self
            .outputs
            .iter()
            .map(|(p, sum)| (p.display().to_string(), json!({ "sha256": sum })))
            .collect();
        json!({
            "command_line": self.command_line,
            "config": self.config,
            "versions": {
                "kissbound": env!("CARGO_PKG_VERSION"),
                "workers": rayon::current_num_threads(),
            },
            "wall_time_seconds": self.started.elapsed().as_secs_f64(),
            "outputs": outputs,
        })
    }

    /// Writes the sidecar `<artifact>.meta.json` for the first output.
    pub fn finish(&self) -> std::io::Result<Option<PathBuf>> {
        let Some((first, _)) = self.outputs.first() else {
            return Ok(None);
        };
        let mut path = first.as_os_str().to_owned();
        path.push(".meta.json");
        let path = PathBuf::from(path);
        let text = serde_json::to_string_pretty(&self.to_json()).expect("metadata serializes");
        std::fs::write(&path, text + "\n")?;
        Ok(Some(path))
    }
}

pub fn checksum(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}
