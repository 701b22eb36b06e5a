use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ProviderRequest, Snippet};

pub const DEFAULT_TTL: Duration = Duration::from_secs(24 * 60 * 60);

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cache entry {path} is corrupt: {source}")]
    Corrupt {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub snippets: Vec<Snippet>,
    /// Seconds since the Unix epoch.
    pub fetched_at: u64,
}

/// Hex SHA-256 over NUL-separated parts.
pub(crate) fn hash_parts(parts: &[&str]) -> String {
    let mut hasher = Sha256::new();
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            hasher.update([0u8]);
        }
        hasher.update(p.as_bytes());
    }
    hex::encode(hasher.finalize())
}

pub(crate) fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Content-addressed on-disk store. Each entry is one JSON file named by its
/// key; writes go through a temporary file and an atomic rename, so readers
/// observe either the previous entry or the new one.
#[derive(Debug, Clone)]
pub struct SnippetCache {
    dir: PathBuf,
    ttl: Duration,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl SnippetCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            ttl: DEFAULT_TTL,
        }
    }

    pub fn with_ttl(mut self, ttl: Duration) -> Self {
        self.ttl = ttl;
        self
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key_for(request: &ProviderRequest) -> String {
        hash_parts(&[
            &request.provider_name,
            request.query.trim(),
            &request.max_results.to_string(),
        ])
    }

    fn path_for(&self, namespace: &str, key: &str) -> PathBuf {
        self.dir.join(namespace).join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Result<Option<CacheEntry>, CacheError> {
        self.get_at(key, unix_now())
    }

    /// Like [`get`](Self::get) with an explicit clock, for expiry checks.
    pub fn get_at(&self, key: &str, now: u64) -> Result<Option<CacheEntry>, CacheError> {
        let Some(entry) = self.read_value::<CacheEntry>("snippets", key)? else {
            return Ok(None);
        };
        if now.saturating_sub(entry.fetched_at) > self.ttl.as_secs() {
            return Ok(None);
        }
        Ok(Some(entry))
    }

    pub fn put(&self, entry: &CacheEntry) -> Result<(), CacheError> {
        self.write_value("snippets", &entry.key, entry)
    }

    /// Reads an arbitrary JSON value stored under `namespace/key`.
    pub fn read_value<T: DeserializeOwned>(
        &self,
        namespace: &str,
        key: &str,
    ) -> Result<Option<T>, CacheError> {
        let path = self.path_for(namespace, key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(source) => return Err(CacheError::Io { path, source }),
        };
        serde_json::from_slice(&bytes)
            .map(Some)
            .map_err(|source| CacheError::Corrupt { path, source })
    }

    pub fn write_value<T: Serialize>(
        &self,
        namespace: &str,
        key: &str,
        value: &T,
    ) -> Result<(), CacheError> {
        let path = self.path_for(namespace, key);
        let parent = path.parent().expect("cache path has a parent");
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CacheError::Io { path, source }
        };
        fs::create_dir_all(parent).map_err(io(parent))?;

        let bytes = serde_json::to_vec_pretty(value).expect("cache values serialize");
        let tmp = parent.join(format!(
            ".{key}.{}.{}.tmp",
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        let mut file = fs::File::create(&tmp).map_err(io(&tmp))?;
        file.write_all(&bytes).map_err(io(&tmp))?;
        file.sync_all().map_err(io(&tmp))?;
        drop(file);
        fs::rename(&tmp, &path).map_err(io(&path))?;
        Ok(())
    }
}
