//! Persistent memo of counts as append-only JSON lines.
//!
//! One record per line: `{"pattern":"2,3,5,1,4","n":12,"marks":[1,4,8],"count":"148"}`
//! for refined cluster numbers, or with `"k"` in place of `"marks"` for
//! cluster numbers. Counts are decimal strings. Unreadable lines are
//! skipped with a warning; a key already present is never rewritten.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::permcore::Permutation;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CacheKey {
    Refined { pattern: Permutation, n: usize, marks: Vec<usize> },
    Cluster { pattern: Permutation, n: usize, k: usize },
}

#[derive(Serialize, Deserialize)]
struct Record {
    pattern: String,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    marks: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    count: String,
}

impl Record {
    fn from_entry(key: &CacheKey, count: &BigUint) -> Self {
        let (pattern, n, marks, k) = match key {
            CacheKey::Refined { pattern, n, marks } => (pattern, *n, Some(marks.clone()), None),
            CacheKey::Cluster { pattern, n, k } => (pattern, *n, None, Some(*k)),
        };
        Record { pattern: pattern.to_string(), n, marks, k, count: count.to_string() }
    }

    fn into_entry(self) -> Option<(CacheKey, BigUint)> {
        let pattern: Permutation = self.pattern.parse().ok()?;
        let count: BigUint = self.count.parse().ok()?;
        let key = match (self.marks, self.k) {
            (Some(marks), None) if marks.windows(2).all(|w| w[0] < w[1]) => {
                CacheKey::Refined { pattern, n: self.n, marks }
            }
            (None, Some(k)) => CacheKey::Cluster { pattern, n: self.n, k },
            _ => return None,
        };
        Some((key, count))
    }
}

#[derive(Debug, Default)]
pub struct CountCache {
    path: Option<PathBuf>,
    map: RwLock<HashMap<CacheKey, BigUint>>,
    pending: Mutex<Vec<String>>,
}

impl CountCache {
    pub fn in_memory() -> Self {
        CountCache::default()
    }

    /// Loads `path` if it exists; new entries are appended to it.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut map = HashMap::new();
        match File::open(&path) {
            Ok(file) => {
                for (lineno, line) in BufReader::new(file).lines().enumerate() {
                    let line = line?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let entry = serde_json::from_str::<Record>(&line).ok().and_then(Record::into_entry);
                    match entry {
                        Some((key, count)) => {
                            map.entry(key).or_insert(count);
                        }
                        None => log::warn!("{}:{}: skipping unreadable cache line", path.display(), lineno + 1),
                    }
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(e.into()),
        }
        Ok(CountCache { path: Some(path), map: RwLock::new(map), pending: Mutex::new(Vec::new()) })
    }

    pub fn get(&self, key: &CacheKey) -> Option<BigUint> {
        self.map.read().unwrap().get(key).cloned()
    }

    pub fn put(&self, key: CacheKey, count: BigUint) {
        let mut map = self.map.write().unwrap();
        if map.contains_key(&key) {
            return;
        }
        if self.path.is_some() {
            let line = serde_json::to_string(&Record::from_entry(&key, &count)).expect("record serializes");
            self.pending.lock().unwrap().push(line);
        }
        map.insert(key, count);
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Appends every entry added since the last flush.
    pub fn flush(&self) -> Result<()> {
        let Some(path) = &self.path else { return Ok(()) };
        let mut pending = self.pending.lock().unwrap();
        if pending.is_empty() {
            return Ok(());
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let mut out = BufWriter::new(file);
        for line in pending.iter() {
            writeln!(out, "{line}")?;
        }
        out.flush()?;
        pending.clear();
        Ok(())
    }
}

impl Drop for CountCache {
    fn drop(&mut self) {
        if let Err(e) = self.flush() {
            log::warn!("cache flush failed: {e}");
        }
    }
}
