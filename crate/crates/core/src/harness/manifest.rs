//! `manifest.txt`: config echo, per-path seeds and status, and a SHA-256
//! digest of every output file.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStatus {
    Pending,
    Complete,
    Failed,
}

impl PathStatus {
    fn name(self) -> &'static str {
        match self {
            PathStatus::Pending => "pending",
            PathStatus::Complete => "complete",
            PathStatus::Failed => "failed",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "pending" => Ok(PathStatus::Pending),
            "complete" => Ok(PathStatus::Complete),
            "failed" => Ok(PathStatus::Failed),
            _ => Err(Error::Parse {
                context: MANIFEST_FILE.into(),
                message: format!("unknown path status `{s}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathEntry {
    pub index: usize,
    pub seed: u64,
    /// ChaCha stream id of the path.
    pub stream: u64,
    pub status: PathStatus,
    pub steps: usize,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub version: String,
    /// `running`, `complete` or `failed`.
    pub status: String,
    pub wall_clock_seconds: Option<f64>,
    pub config: ExperimentConfig,
    pub paths: Vec<PathEntry>,
    /// `(relative path, sha256 hex)`, sorted by path.
    pub files: Vec<(String, String)>,
    /// Free-form `key = value` notes such as measured constants.
    pub notes: Vec<(String, String)>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn digest_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    Ok(sha256_hex(&std::fs::read(path).map_err(|e| Error::io(path, e))?))
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            status: "running".into(),
            wall_clock_seconds: None,
            config: config.clone(),
            paths: (0..config.paths)
                .map(|i| PathEntry {
                    index: i,
                    seed: config.seed,
                    stream: i as u64,
                    status: PathStatus::Pending,
                    steps: 0,
                    message: None,
                })
                .collect(),
            files: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::from("# stokeslab run manifest\n");
        let _ = writeln!(s, "version = {}", self.version);
        let _ = writeln!(s, "status = {}", self.status);
        if let Some(w) = self.wall_clock_seconds {
            let _ = writeln!(s, "wall_clock_seconds = {w:.3}");
        }
        for line in self.config.to_text().lines() {
            let _ = writeln!(s, "config.{line}");
        }
        for p in &self.paths {
            let _ = write!(
                s,
                "path.{:04} = {} seed={} stream={} steps={}",
                p.index,
                p.status.name(),
                p.seed,
                p.stream,
                p.steps
            );
            if let Some(m) = &p.message {
                let _ = write!(s, " error={}", m.replace(['\n', '\r'], " "));
            }
            s.push('\n');
        }
        for (k, v) in &self.notes {
            let _ = writeln!(s, "note.{k} = {v}");
        }
        for (f, d) in &self.files {
            let _ = writeln!(s, "file.{f} = {d}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = |message: String| Error::Parse {
            context: MANIFEST_FILE.into(),
            message,
        };
        let mut version = None;
        let mut status = None;
        let mut wall = None;
        let mut config_text = String::new();
        let mut paths = Vec::new();
        let mut files = Vec::new();
        let mut notes = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once(" = ")
                .ok_or_else(|| err(format!("malformed line `{line}`")))?;
            if let Some(c) = k.strip_prefix("config.") {
                let _ = writeln!(config_text, "{c} = {v}");
            } else if let Some(idx) = k.strip_prefix("path.") {
                let index = idx.parse().map_err(|_| err(format!("bad path index `{idx}`")))?;
                let (head, message) = match v.split_once(" error=") {
                    Some((h, m)) => (h, Some(m.to_string())),
                    None => (v, None),
                };
                let mut parts = head.split_whitespace();
                let status = PathStatus::parse(parts.next().unwrap_or(""))?;
                let mut entry = PathEntry {
                    index,
                    seed: 0,
                    stream: 0,
                    status,
                    steps: 0,
                    message,
                };
                for part in parts {
                    let (pk, pv) = part.split_once('=').ok_or_else(|| err(format!("bad field `{part}`")))?;
                    let num = || pv.parse::<u64>().map_err(|_| err(format!("bad number `{pv}`")));
                    match pk {
                        "seed" => entry.seed = num()?,
                        "stream" => entry.stream = num()?,
                        "steps" => entry.steps = num()? as usize,
                        _ => return Err(err(format!("unknown path field `{pk}`"))),
                    }
                }
                paths.push(entry);
            } else if let Some(f) = k.strip_prefix("file.") {
                files.push((f.to_string(), v.to_string()));
            } else if let Some(n) = k.strip_prefix("note.") {
                notes.push((n.to_string(), v.to_string()));
            } else {
                match k {
                    "version" => version = Some(v.to_string()),
                    "status" => status = Some(v.to_string()),
                    "wall_clock_seconds" => wall = Some(v.parse().map_err(|_| err(format!("bad wall clock `{v}`")))?),
                    _ => return Err(err(format!("unknown key `{k}`"))),
                }
            }
        }
        Ok(Self {
            version: version.ok_or_else(|| err("missing version".into()))?,
            status: status.ok_or_else(|| err("missing status".into()))?,
            wall_clock_seconds: wall,
            config: ExperimentConfig::parse(&config_text)?,
            paths,
            files,
            notes,
        })
    }

    /// Writes to a temporary file and renames it over `manifest.txt`.
    pub fn write_atomic(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        let tmp = dir.join(format!("{MANIFEST_FILE}.tmp"));
        std::fs::write(&tmp, self.render()).map_err(|e| Error::io(&tmp, e))?;
        let target = dir.join(MANIFEST_FILE);
        std::fs::rename(&tmp, &target).map_err(|e| Error::io(&target, e))
    }

    pub fn read(dir: impl AsRef<Path>) -> Result<Self> {
        let path = dir.as_ref().join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Self::parse(&text)
    }

    pub fn note(&self, key: &str) -> Option<&str> {
        self.notes.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Sets or replaces a note.
    pub fn set_note(&mut self, key: &str, value: String) {
        match self.notes.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.notes.push((key.to_string(), value)),
        }
    }

    /// Adds or refreshes the digest of `relative` (inside `dir`).
    pub fn record_file(&mut self, dir: impl AsRef<Path>, relative: &str) -> Result<()> {
        let digest = digest_file(dir.as_ref().join(relative))?;
        match self.files.iter_mut().find(|(f, _)| f == relative) {
            Some(entry) => entry.1 = digest,
            None => self.files.push((relative.to_string(), digest)),
        }
        self.files.sort();
        Ok(())
    }

    /// Files whose current digest differs from the recorded one.
    pub fn verify(&self, dir: impl AsRef<Path>) -> Result<Vec<String>> {
        let dir = dir.as_ref();
        let mut bad = Vec::new();
        for (f, d) in &self.files {
            if digest_file(dir.join(f)).ok().as_deref() != Some(d.as_str()) {
                bad.push(f.clone());
            }
        }
        Ok(bad)
    }
}
