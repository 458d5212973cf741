use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "NETINTERP_OUT";

/// Everything needed to rerun a command: the original arguments plus what it
/// read and wrote.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, as given.
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub version: String,
    pub started: String,
    pub duration_secs: f64,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// A fresh per-run output directory, `<root>/<command>-<timestamp>-seed<seed>`.
/// Removed again if dropped before [`RunDir::finish`], so failed runs leave nothing behind.
pub struct RunDir {
    pub path: PathBuf,
    manifest: RunManifest,
    clock: Instant,
    finished: bool,
}

impl RunDir {
    pub fn create<C: Serialize>(
        root: Option<&Path>,
        command: &str,
        args: &[String],
        config: &C,
        seed: Option<u64>,
    ) -> Result<Self> {
        let root = match root {
            Some(r) => r.to_path_buf(),
            None => std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("runs"), PathBuf::from),
        };
        let now = chrono::Utc::now();
        let stem = format!(
            "{command}-{}-seed{}",
            now.format("%Y%m%dT%H%M%S%.3fZ"),
            seed.map_or_else(|| "none".to_string(), |s| s.to_string())
        );
        fs::create_dir_all(&root).with_context(|| format!("creating {}", root.display()))?;
        let mut path = root.join(&stem);
        let mut bump = 1;
        while path.exists() {
            path = root.join(format!("{stem}-{bump}"));
            bump += 1;
        }
        fs::create_dir(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok(RunDir {
            path,
            manifest: RunManifest {
                command: command.to_string(),
                args: args.to_vec(),
                config: serde_json::to_value(config)?,
                seed,
                inputs: Vec::new(),
                outputs: Vec::new(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                started: now.to_rfc3339(),
                duration_secs: 0.0,
            },
            clock: Instant::now(),
            finished: false,
        })
    }

    pub fn input(&mut self, p: &Path) {
        self.manifest.inputs.push(p.to_path_buf());
    }

    /// Path of a new output file inside the run directory.
    pub fn output(&mut self, name: &str) -> PathBuf {
        let p = self.path.join(name);
        self.manifest.outputs.push(p.clone());
        p
    }

    pub fn writer(&mut self, name: &str) -> Result<BufWriter<File>> {
        let p = self.output(name);
        Ok(BufWriter::new(File::create(&p).with_context(|| format!("creating {}", p.display()))?))
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let mut w = self.writer(name)?;
        w.write_all(text.as_bytes())?;
        w.flush()?;
        Ok(())
    }

    /// Writes the manifest and returns the run directory.
    pub fn finish(mut self) -> Result<PathBuf> {
        self.manifest.duration_secs = self.clock.elapsed().as_secs_f64();
        let p = self.path.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&self.manifest)?;
        fs::write(&p, text + "\n").with_context(|| format!("writing {}", p.display()))?;
        self.finished = true;
        Ok(std::mem::take(&mut self.path))
    }
}

impl Drop for RunDir {
    fn drop(&mut self) {
        if !self.finished {
            let _ = fs::remove_dir_all(&self.path);
        }
    }
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let p = if path.is_dir() { path.join(MANIFEST_FILE) } else { path.to_path_buf() };
    let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
}
