//! Append-only JSON-lines result cache.
//!
//! Every line is one record keyed by the SHA-256 of
//! `ground|r|k_or_pattern|method`. A key may only ever carry one count;
//! loading or appending a different count for a known key is a conflict.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub key: String,
    /// `count`, `pattern`, `scan` or `aw`.
    pub role: String,
    pub ground: String,
    pub r: u32,
    pub k_or_pattern: String,
    pub method: String,
    /// Decimal string.
    pub count: String,
    pub elapsed_ms: u64,
    pub nodes: u64,
    pub created_at: String,
}

impl CacheRecord {
    pub fn new(role: &str, ground: String, r: u32, k_or_pattern: String, method: &str, count: String) -> Self {
        CacheRecord {
            key: cache_key(&ground, r, &k_or_pattern, method),
            role: role.to_string(),
            ground,
            r,
            k_or_pattern,
            method: method.to_string(),
            count,
            elapsed_ms: 0,
            nodes: 0,
            created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

pub fn cache_key(ground: &str, r: u32, k_or_pattern: &str, method: &str) -> String {
    let digest = Sha256::digest(format!("{ground}|{r}|{k_or_pattern}|{method}").as_bytes());
    hex::encode(digest)
}

pub struct Cache {
    path: PathBuf,
    records: HashMap<String, CacheRecord>,
}

impl Cache {
    /// Reads the cache at `path`; a missing file is an empty cache.
    pub fn open(path: &Path) -> Result<Self, CliError> {
        let mut records: HashMap<String, CacheRecord> = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path)?);
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: CacheRecord = match serde_json::from_str(&line) {
                    Ok(rec) => rec,
                    Err(e) => {
                        eprintln!("warning: skipping corrupt cache line {} in {}: {e}", i + 1, path.display());
                        continue;
                    }
                };
                let expected = cache_key(&rec.ground, rec.r, &rec.k_or_pattern, &rec.method);
                if rec.key != expected {
                    eprintln!("warning: skipping cache line {} in {}: key does not match its fields", i + 1, path.display());
                    continue;
                }
                if let Some(old) = records.get(&rec.key) {
                    if old.count != rec.count {
                        return Err(conflict(old, &rec.count));
                    }
                    continue;
                }
                records.insert(rec.key.clone(), rec);
            }
        }
        Ok(Cache { path: path.to_path_buf(), records })
    }

    pub fn lookup(&self, key: &str) -> Option<&CacheRecord> {
        self.records.get(key)
    }

    /// Appends `rec` unless an equal count is already stored under its key.
    pub fn append(&mut self, rec: CacheRecord) -> Result<(), CliError> {
        if let Some(old) = self.records.get(&rec.key) {
            if old.count != rec.count {
                return Err(conflict(old, &rec.count));
            }
            return Ok(());
        }
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        writeln!(file, "{}", serde_json::to_string(&rec).expect("record serializes"))?;
        self.records.insert(rec.key.clone(), rec);
        Ok(())
    }
}

fn conflict(old: &CacheRecord, new: &str) -> CliError {
    CliError::Conflict(format!(
        "cache conflict for {} r={} {} {}: stored {} but got {}",
        old.ground, old.r, old.k_or_pattern, old.method, old.count, new
    ))
}
