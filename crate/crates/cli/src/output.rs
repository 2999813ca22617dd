use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};

/// Collects the files written by one subcommand and emits its manifest.
pub struct Run {
    pub dir: PathBuf,
    pub subcommand: String,
    pub params: Map<String, Value>,
    pub seed: u64,
    pub jobs: usize,
    outputs: Vec<String>,
    started: Instant,
}

impl Run {
    pub fn new(
        dir: &Path,
        subcommand: &str,
        params: Map<String, Value>,
        seed: u64,
        jobs: usize,
    ) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Run {
            dir: dir.to_path_buf(),
            subcommand: subcommand.to_string(),
            params,
            seed,
            jobs,
            outputs: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<PathBuf, String> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| e.to_string())?;
        for r in rows {
            w.serialize(r).map_err(|e| e.to_string())?;
        }
        w.flush().map_err(|e| e.to_string())?;
        self.outputs.push(name.to_string());
        Ok(path)
    }

    pub fn bytes(&mut self, name: &str, data: &[u8]) -> Result<PathBuf, String> {
        let path = self.dir.join(name);
        fs::write(&path, data).map_err(|e| e.to_string())?;
        self.outputs.push(name.to_string());
        Ok(path)
    }

    pub fn finish(&self, status: &str) -> Result<(), String> {
        let manifest = json!({
            "subcommand": self.subcommand,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "seed": self.seed,
            "params": self.params,
            "outputs": self.outputs,
            "jobs": self.jobs,
            "status": status,
            "wall_time_s": self.started.elapsed().as_secs_f64(),
        });
        let path = self.dir.join(format!("{}.manifest.json", self.subcommand));
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| e.to_string())?;
        fs::write(path, text + "\n").map_err(|e| e.to_string())
    }
}
