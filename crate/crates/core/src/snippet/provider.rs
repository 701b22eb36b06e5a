//! Pluggable search providers and the cached `fetch` entry point.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::cache::{hash_parts, unix_now, CacheEntry, CacheError, SnippetCache};
use super::{parse_snippet_xml, write_snippet_xml, Snippet};

pub const DEFAULT_MAX_RESULTS: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProviderRequest {
    pub query: String,
    pub max_results: usize,
    pub provider_name: String,
}

impl ProviderRequest {
    pub fn new(query: impl Into<String>, max_results: usize, provider: impl Into<String>) -> Self {
        Self {
            query: query.into(),
            max_results,
            provider_name: provider.into(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProviderError {
    #[error("query is empty")]
    EmptyQuery,
    #[error("unknown provider {0:?}")]
    UnknownProvider(String),
    #[error("provider {provider:?} failed: {payload}")]
    Transport { provider: String, payload: String },
    #[error("provider {provider:?} is misconfigured: {message}")]
    Config { provider: String, message: String },
    #[error(transparent)]
    Cache(#[from] CacheError),
}

pub trait SearchProvider: Send + Sync {
    fn name(&self) -> &str;

    /// Returns up to `max_results` snippets for `query`. An empty list is a valid answer.
    fn search(&self, query: &str, max_results: usize) -> Result<Vec<Snippet>, ProviderError>;
}

#[derive(Default, Clone)]
pub struct ProviderRegistry {
    providers: HashMap<String, Arc<dyn SearchProvider>>,
}

impl std::fmt::Debug for ProviderRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut names: Vec<_> = self.providers.keys().collect();
        names.sort();
        f.debug_struct("ProviderRegistry")
            .field("providers", &names)
            .finish()
    }
}

impl ProviderRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, provider: Arc<dyn SearchProvider>) {
        self.providers.insert(provider.name().to_string(), provider);
    }

    pub fn get(&self, name: &str) -> Result<&Arc<dyn SearchProvider>, ProviderError> {
        self.providers
            .get(name)
            .ok_or_else(|| ProviderError::UnknownProvider(name.to_string()))
    }
}

/// Serves the request from `cache` when a fresh entry exists, otherwise asks
/// the named provider and stores its answer before returning it.
pub fn fetch(
    request: &ProviderRequest,
    registry: &ProviderRegistry,
    cache: &SnippetCache,
) -> Result<Vec<Snippet>, ProviderError> {
    let provider = registry.get(&request.provider_name)?;
    let query = request.query.trim();
    if query.is_empty() {
        return Err(ProviderError::EmptyQuery);
    }
    if request.max_results == 0 {
        return Ok(Vec::new());
    }

    let key = SnippetCache::key_for(request);
    if let Some(hit) = cache.get(&key)? {
        return Ok(hit.snippets);
    }

    let mut snippets = provider.search(query, request.max_results)?;
    snippets.truncate(request.max_results);
    cache.put(&CacheEntry {
        key,
        snippets: snippets.clone(),
        fetched_at: unix_now(),
    })?;
    Ok(snippets)
}

/// Offline provider backed by a directory of snippet XML files.
///
/// Layout: `manifest.json` maps each query string to a file name, and each
/// file is named `<query-hash>.xml` (see [`FixtureProvider::file_name_for`]).
#[derive(Debug, Clone)]
pub struct FixtureProvider {
    dir: PathBuf,
    manifest: BTreeMap<String, String>,
}

pub const FIXTURE_PROVIDER_NAME: &str = "fixture";
const MANIFEST: &str = "manifest.json";

impl FixtureProvider {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, ProviderError> {
        let dir = dir.into();
        let config_err = |message: String| ProviderError::Config {
            provider: FIXTURE_PROVIDER_NAME.into(),
            message,
        };
        if !dir.is_dir() {
            return Err(config_err(format!(
                "corpus directory {} does not exist",
                dir.display()
            )));
        }
        let manifest = match fs::read(dir.join(MANIFEST)) {
            Ok(bytes) => serde_json::from_slice(&bytes)
                .map_err(|e| config_err(format!("bad {MANIFEST}: {e}")))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(config_err(format!("cannot read {MANIFEST}: {e}"))),
        };
        Ok(Self { dir, manifest })
    }

    pub fn file_name_for(query: &str) -> String {
        let hash = hash_parts(&[query.trim()]);
        format!("{}.xml", &hash[..16])
    }

    pub fn queries(&self) -> impl Iterator<Item = &str> {
        self.manifest.keys().map(String::as_str)
    }

    /// Adds (or replaces) a query's snippets in a corpus directory, creating it if needed.
    pub fn add_to_corpus(
        dir: &Path,
        query: &str,
        snippets: &[Snippet],
    ) -> Result<(), std::io::Error> {
        fs::create_dir_all(dir)?;
        let manifest_path = dir.join(MANIFEST);
        let mut manifest: BTreeMap<String, String> = match fs::read(&manifest_path) {
            Ok(bytes) => serde_json::from_slice(&bytes)
                .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(e),
        };
        let file = Self::file_name_for(query);
        fs::write(dir.join(&file), write_snippet_xml(snippets))?;
        manifest.insert(query.trim().to_string(), file);
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        fs::write(manifest_path, text)
    }
}

impl SearchProvider for FixtureProvider {
    fn name(&self) -> &str {
        FIXTURE_PROVIDER_NAME
    }

    fn search(&self, query: &str, max_results: usize) -> Result<Vec<Snippet>, ProviderError> {
        let Some(file) = self.manifest.get(query.trim()) else {
            return Ok(Vec::new());
        };
        let path = self.dir.join(file);
        let transport = |payload: String| ProviderError::Transport {
            provider: FIXTURE_PROVIDER_NAME.into(),
            payload,
        };
        let bytes = fs::read(&path).map_err(|e| transport(format!("{}: {e}", path.display())))?;
        let mut snippets =
            parse_snippet_xml(&bytes).map_err(|e| transport(format!("{}: {e}", path.display())))?;
        snippets.truncate(max_results);
        Ok(snippets)
    }
}
