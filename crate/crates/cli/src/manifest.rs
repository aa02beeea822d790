use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

/// Everything needed to re-run a command. Output files carry it as a `#`
/// header without the wall time and worker count, so identical parameters
/// give byte-identical files; the full record goes to a JSON sidecar.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub input_files: Vec<String>,
    pub output_files: Vec<String>,
    pub wall_time_secs: f64,
    pub worker_count: usize,
}

impl RunManifest {
    pub fn new(command: &str, workers: usize) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            input_files: Vec::new(),
            output_files: Vec::new(),
            wall_time_secs: 0.0,
            worker_count: workers,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> RunManifest {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn input(mut self, path: &Path) -> RunManifest {
        self.input_files.push(path.display().to_string());
        self
    }

    pub fn output(mut self, path: &Path) -> RunManifest {
        self.output_files.push(path.display().to_string());
        self
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec![format!("twostack {}", self.command)];
        h.extend(self.parameters.iter().map(|(k, v)| format!("{k} = {v}")));
        h.extend(self.input_files.iter().map(|f| format!("input: {f}")));
        h
    }

    pub fn finish(&mut self, elapsed: Duration) {
        self.wall_time_secs = elapsed.as_secs_f64();
    }

    pub fn sidecar_path(out: &Path) -> PathBuf {
        let mut name = out.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        out.with_file_name(name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialises") + "\n"
    }
}
