use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use sha2::{Digest, Sha256};

use super::{ProgramInput, RepairOutput};

/// SHA-256 over (model identity, beam, canonical input serialization).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CacheKey([u8; 32]);

impl CacheKey {
    pub fn new(identity: &str, input: &ProgramInput, beam: usize) -> Self {
        let mut h = Sha256::new();
        h.update(identity.as_bytes());
        h.update([0u8]);
        h.update((beam as u64).to_le_bytes());
        h.update(input.canonical().as_bytes());
        Self(h.finalize().into())
    }

    pub fn hex(&self) -> String {
        hex::encode(self.0)
    }
}

/// Concurrent response cache with an optional on-disk spill directory.
#[derive(Debug, Default)]
pub struct ResponseCache {
    memory: RwLock<HashMap<CacheKey, RepairOutput>>,
    spill: Option<PathBuf>,
}

impl ResponseCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn with_spill(dir: impl Into<PathBuf>) -> Self {
        Self {
            memory: RwLock::default(),
            spill: Some(dir.into()),
        }
    }

    fn spill_path(dir: &Path, key: &CacheKey) -> PathBuf {
        dir.join(format!("{}.json", key.hex()))
    }

    pub fn get(&self, key: &CacheKey) -> Option<RepairOutput> {
        if let Some(hit) = self.memory.read().expect("cache lock poisoned").get(key) {
            return Some(hit.clone());
        }
        let dir = self.spill.as_ref()?;
        let text = fs::read_to_string(Self::spill_path(dir, key)).ok()?;
        let out: RepairOutput = serde_json::from_str(&text).ok()?;
        self.memory
            .write()
            .expect("cache lock poisoned")
            .insert(*key, out.clone());
        Some(out)
    }

    pub fn insert(&self, key: &CacheKey, output: &RepairOutput) {
        self.memory
            .write()
            .expect("cache lock poisoned")
            .insert(*key, output.clone());
        if let Some(dir) = &self.spill {
            // A failed spill only costs a future re-query.
            let write = fs::create_dir_all(dir).and_then(|_| {
                let body = serde_json::to_string(output).map_err(std::io::Error::other)?;
                fs::write(Self::spill_path(dir, key), body)
            });
            if let Err(e) = write {
                log::warn!("cache spill to {} failed: {e}", dir.display());
            }
        }
    }

    pub fn len(&self) -> usize {
        self.memory.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
