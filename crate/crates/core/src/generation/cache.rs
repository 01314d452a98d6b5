//! Generation cache for incremental regeneration.
//!
//! `gencache.map` holds one line per artifact:
//!
//! ```text
//! <artifact> <key_digest> <content_digest>
//! ```
//!
//! Both digests are lowercase hex SHA-256. Malformed lines are dropped on
//! load, which turns them into cache misses.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

pub const CACHE_FILE: &str = "gencache.map";

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheEntry {
    pub key_digest: String,
    pub content_digest: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GenCache {
    pub entries: BTreeMap<String, CacheEntry>,
}

impl GenCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, path: &str) -> Option<&CacheEntry> {
        self.entries.get(path)
    }

    pub fn insert(&mut self, path: &str, key_digest: String, content_digest: String) {
        self.entries.insert(
            path.to_string(),
            CacheEntry {
                key_digest,
                content_digest,
            },
        );
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|(p, e)| format!("{p} {} {}\n", e.key_digest, e.content_digest))
            .collect()
    }

    pub fn parse(text: &str) -> Self {
        let is_digest = |s: &str| s.len() == 64 && s.bytes().all(|b| b.is_ascii_hexdigit());
        let mut cache = GenCache::new();
        for line in text.lines() {
            let parts: Vec<&str> = line.split(' ').collect();
            if let [path, key, content] = parts[..] {
                if !path.is_empty() && is_digest(key) && is_digest(content) {
                    cache.insert(path, key.to_string(), content.to_string());
                }
            }
        }
        cache
    }
}
