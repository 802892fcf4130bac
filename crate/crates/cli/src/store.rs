//! Append-only JSONL result store.
//!
//! Each line is one [`Record`]. Reruns skip keys that already have an `ok`
//! record; [`Store::compact`] keeps one record per key, sorted by key, so
//! the file contents do not depend on the order workers finished in.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use bianchi_core::presentations::GroupKind;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    H1,
    H2,
    Abelianize,
    Sweep,
    Stats,
    Compact,
}

/// Identifies one unit of work. Fields a task does not use stay at their
/// defaults (level "1" for level-one tasks, weights 0 for congruence tasks).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Key {
    pub task: Task,
    pub group: GroupKind,
    pub d: u32,
    pub norm: u64,
    pub level: String,
    pub k: u32,
    pub l: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub key: Key,
    pub status: Status,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub result: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

pub struct Store {
    path: PathBuf,
    /// Latest record per key, `ok` records taking precedence.
    records: BTreeMap<Key, Record>,
    /// Whether the file holds exactly `records` in key order.
    compact: bool,
}

impl Store {
    pub fn open(path: &Path) -> Result<Store> {
        let mut store = Store { path: path.to_path_buf(), records: BTreeMap::new(), compact: true };
        if !path.exists() {
            return Ok(store);
        }
        let file = File::open(path).with_context(|| format!("opening store {}", path.display()))?;
        let mut previous: Option<Key> = None;
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record: Record = match serde_json::from_str(&line) {
                Ok(r) => r,
                Err(e) => {
                    // an interrupted append leaves a truncated last line
                    eprintln!("warning: skipping unreadable store line {}: {e}", i + 1);
                    store.compact = false;
                    continue;
                }
            };
            if previous.as_ref().is_some_and(|p| p >= &record.key) {
                store.compact = false;
            }
            previous = Some(record.key.clone());
            store.insert(record);
        }
        Ok(store)
    }

    fn insert(&mut self, record: Record) {
        let keep_old = matches!(self.records.get(&record.key), Some(old) if old.status == Status::Ok && record.status != Status::Ok);
        if !keep_old {
            self.records.insert(record.key.clone(), record);
        }
    }

    pub fn is_done(&self, key: &Key) -> bool {
        self.records.get(key).is_some_and(|r| r.status == Status::Ok)
    }

    pub fn records(&self) -> impl Iterator<Item = &Record> {
        self.records.values()
    }

    pub fn ok_results(&self, task: Task) -> impl Iterator<Item = &Record> {
        self.records.values().filter(move |r| r.key.task == task && r.status == Status::Ok)
    }

    /// Append one record and flush, so an interrupted sweep keeps its work.
    pub fn append(&mut self, record: Record) -> Result<()> {
        if let Some(dir) = self.path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        writeln!(file, "{}", serde_json::to_string(&record)?)?;
        if self.records.last_key_value().is_some_and(|(k, _)| k >= &record.key) || self.records.contains_key(&record.key) {
            self.compact = false;
        }
        self.insert(record);
        Ok(())
    }

    /// Rewrite the file as one record per key in key order. Does nothing if
    /// the file is already in that form.
    pub fn compact(&mut self) -> Result<()> {
        if self.compact {
            return Ok(());
        }
        let tmp = self.path.with_extension("jsonl.tmp");
        {
            let mut out = std::io::BufWriter::new(File::create(&tmp)?);
            for r in self.records.values() {
                writeln!(out, "{}", serde_json::to_string(r)?)?;
            }
            out.flush()?;
        }
        fs::rename(&tmp, &self.path)?;
        self.compact = true;
        Ok(())
    }
}
