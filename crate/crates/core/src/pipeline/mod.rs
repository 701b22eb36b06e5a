//! End-to-end clustering: fetch or parse, deduplicate, clean, build the tree,
//! score, merge, and consolidate by root.

mod compare;
mod config;
mod render;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use compare::{compare_schemes, label_occurs_in, SchemeReport, SchemeSummary};
pub use config::{ConfigError, PipelineConfig, Resources, Scheme, CONFIG_ENV};
pub use render::{parse_tree, render_tree, TreeCluster, TreeParseError, TreeView};

use crate::arabic::TokenSequence;
use crate::consolidate::{
    group_by_signature, root_signatures, without_grouping, ConsolidatedCluster,
};
use crate::snippet::cache::{hash_parts, unix_now};
use crate::snippet::{
    dedup_snippets, fetch, parse_snippets, CacheError, FixtureProvider, ParseError, ProviderError,
    ProviderRegistry, ProviderRequest, SearchProvider, Snippet, SnippetCache, SnippetFormat,
    FIXTURE_PROVIDER_NAME,
};
use crate::stc::{extract_base_clusters, merge_clusters, select_top_k};
use crate::suffix_tree::{SuffixTree, TreeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Fetch,
    Parse,
    Dedup,
    Clean,
    /// Token-level root extraction, stem-first scheme only.
    Stem,
    BuildTree,
    BaseClusters,
    SelectTopK,
    Merge,
    /// Label-level root extraction, new scheme only.
    Roots,
    Consolidate,
    Cache,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Fetch => "fetch",
            Stage::Parse => "parse",
            Stage::Dedup => "dedup",
            Stage::Clean => "clean",
            Stage::Stem => "stem",
            Stage::BuildTree => "build-tree",
            Stage::BaseClusters => "base-clusters",
            Stage::SelectTopK => "select-top-k",
            Stage::Merge => "merge",
            Stage::Roots => "roots",
            Stage::Consolidate => "consolidate",
            Stage::Cache => "cache",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: Stage,
    pub micros: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("fetch: {0}")]
    Fetch(#[from] ProviderError),
    #[error("parse: cannot read {}: {source}", .path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse: {}: {source}", .path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("build-tree: {0}")]
    Tree(#[from] TreeError),
    #[error("cache: {0}")]
    Cache(#[from] CacheError),
}

impl PipelineError {
    pub fn stage(&self) -> Stage {
        match self {
            PipelineError::Fetch(_) => Stage::Fetch,
            PipelineError::Read { .. } | PipelineError::Parse { .. } => Stage::Parse,
            PipelineError::Tree(_) => Stage::BuildTree,
            PipelineError::Cache(_) => Stage::Cache,
        }
    }

    /// Short machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            PipelineError::Fetch(ProviderError::EmptyQuery) => "empty-query",
            PipelineError::Fetch(ProviderError::UnknownProvider(_)) => "unknown-provider",
            PipelineError::Fetch(ProviderError::Config { .. }) => "provider-config",
            PipelineError::Fetch(ProviderError::Transport { .. }) => "provider-failed",
            PipelineError::Fetch(ProviderError::Cache(_)) | PipelineError::Cache(_) => "cache",
            PipelineError::Read { .. } => "unreadable-input",
            PipelineError::Parse { .. } => "parse-error",
            PipelineError::Tree(_) => "bad-input",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterResult {
    pub query: String,
    pub scheme: Scheme,
    pub clusters: Vec<ConsolidatedCluster>,
    /// Snippet ids that belong to no cluster, ascending.
    pub unclustered: Vec<u32>,
    /// The deduplicated snippets; cluster members index into this list.
    pub snippets: Vec<Snippet>,
    #[serde(default)]
    pub timings: Vec<StageTiming>,
}

#[derive(Serialize)]
struct Canonical<'a> {
    query: &'a str,
    scheme: Scheme,
    clusters: &'a [ConsolidatedCluster],
    unclustered: &'a [u32],
    snippets: &'a [Snippet],
}

impl ClusterResult {
    pub fn empty(query: impl Into<String>, scheme: Scheme) -> Self {
        Self {
            query: query.into(),
            scheme,
            clusters: Vec::new(),
            unclustered: Vec::new(),
            snippets: Vec::new(),
            timings: Vec::new(),
        }
    }

    /// JSON of everything except timings; identical inputs give identical bytes.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&Canonical {
            query: &self.query,
            scheme: self.scheme,
            clusters: &self.clusters,
            unclustered: &self.unclustered,
            snippets: &self.snippets,
        })
        .expect("result serializes")
    }

    pub fn stages(&self) -> Vec<Stage> {
        self.timings.iter().map(|t| t.stage).collect()
    }

    pub fn tree_view(&self) -> TreeView {
        TreeView {
            query: self.query.clone(),
            scheme: self.scheme,
            clusters: self
                .clusters
                .iter()
                .map(|c| TreeCluster {
                    display_label: c.display_label.clone(),
                    members: c.members.clone(),
                    merged_from: c.merged_from.clone(),
                })
                .collect(),
            unclustered: self.unclustered.clone(),
        }
    }
}

#[derive(Default)]
struct Timer {
    timings: Vec<StageTiming>,
}

impl Timer {
    fn time<T>(&mut self, stage: Stage, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push(StageTiming {
            stage,
            micros: start.elapsed().as_micros() as u64,
        });
        out
    }
}

#[derive(Serialize, Deserialize)]
struct StoredResult {
    stored_at: u64,
    result: ClusterResult,
}

/// A configured pipeline. Cheap to clone; clones share loaded resources.
#[derive(Clone)]
pub struct Pipeline {
    config: PipelineConfig,
    resources: Arc<Resources>,
    registry: ProviderRegistry,
    cache: SnippetCache,
}

impl std::fmt::Debug for Pipeline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Pipeline")
            .field("config", &self.config)
            .field("registry", &self.registry)
            .finish_non_exhaustive()
    }
}

impl Pipeline {
    /// Validates the config, loads resources and registers the fixture
    /// provider when a corpus directory is configured.
    pub fn new(config: PipelineConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let resources = Arc::new(Resources::load(&config)?);
        let mut registry = ProviderRegistry::new();
        if let Some(dir) = &config.corpus_dir {
            let provider = FixtureProvider::open(dir).map_err(|e| {
                ConfigError::Invalid(crate::InvalidValue::new("corpus_dir", e.to_string()))
            })?;
            registry.register(Arc::new(provider));
        }
        let cache = SnippetCache::new(&config.cache_dir).with_ttl(config.cache_ttl());
        Ok(Self {
            config,
            resources,
            registry,
            cache,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn resources(&self) -> &Resources {
        &self.resources
    }

    pub fn register_provider(&mut self, provider: Arc<dyn SearchProvider>) {
        self.registry.register(provider);
    }

    /// Same resources and providers, different scheme.
    pub fn with_scheme(&self, scheme: Scheme) -> Self {
        let mut p = self.clone();
        p.config.scheme = scheme;
        p
    }

    /// Same resources and providers, different provider name.
    pub fn with_provider_name(&self, name: impl Into<String>) -> Self {
        let mut p = self.clone();
        p.config.provider_name = name.into();
        p
    }

    /// Fetches snippets for `query` through the configured provider and cache.
    pub fn fetch(&self, query: &str) -> Result<Vec<Snippet>, PipelineError> {
        let name = &self.config.provider_name;
        if name == FIXTURE_PROVIDER_NAME && self.registry.get(name).is_err() {
            return Err(ProviderError::Config {
                provider: name.clone(),
                message: "no corpus_dir configured".into(),
            }
            .into());
        }
        let request = ProviderRequest::new(query, self.config.max_results, name.clone());
        Ok(fetch(&request, &self.registry, &self.cache)?)
    }

    /// Full run for a query, served from the result cache when possible.
    pub fn run_query(&self, query: &str) -> Result<ClusterResult, PipelineError> {
        let query = query.trim();
        if query.is_empty() {
            return Err(ProviderError::EmptyQuery.into());
        }
        let key = hash_parts(&[
            query,
            &self.config.provider_name,
            &self.config.max_results.to_string(),
            &self.config.fingerprint(),
        ]);
        let ttl = self.config.cache_ttl_secs;
        if let Ok(Some(stored)) = self.cache.read_value::<StoredResult>("results", &key) {
            if unix_now().saturating_sub(stored.stored_at) <= ttl {
                return Ok(stored.result);
            }
        }

        let mut timer = Timer::default();
        let snippets = timer.time(Stage::Fetch, || self.fetch(query))?;
        let result = self.cluster_timed(query, snippets, timer);
        self.cache.write_value(
            "results",
            &key,
            &StoredResult {
                stored_at: unix_now(),
                result: result.clone(),
            },
        )?;
        Ok(result)
    }

    /// Full run over a snippet file (XML or JSON lines, by extension).
    pub fn run_file(&self, path: &Path) -> Result<ClusterResult, PipelineError> {
        let mut timer = Timer::default();
        let snippets = timer.time(Stage::Parse, || read_snippet_file(path))?;
        let query = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(self.cluster_timed(&query, snippets, timer))
    }

    /// Clusters snippets that are already in hand. Never fails: empty or
    /// unusable input gives an empty result.
    pub fn cluster(&self, query: &str, snippets: Vec<Snippet>) -> ClusterResult {
        self.cluster_timed(query, snippets, Timer::default())
    }

    pub fn compare(&self, query: &str, snippets: Vec<Snippet>) -> SchemeReport {
        compare_schemes(self, query, snippets)
    }

    fn cluster_timed(
        &self,
        query: &str,
        snippets: Vec<Snippet>,
        mut timer: Timer,
    ) -> ClusterResult {
        let scheme = self.config.scheme;
        let sim = &self.config.similarity;
        let cleaner = &self.resources.cleaner;
        let extractor = &self.resources.extractor;

        let snippets = timer.time(Stage::Dedup, || {
            dedup_snippets(snippets.into_iter().filter(|s| !s.is_blank()).collect()).snippets
        });
        let mut sequences: Vec<TokenSequence> = timer.time(Stage::Clean, || {
            snippets.iter().map(|s| cleaner.to_sequence(s)).collect()
        });
        if scheme == Scheme::StemFirst {
            sequences = timer.time(Stage::Stem, || {
                sequences
                    .iter()
                    .map(|seq| seq.map_words(|w| extractor.extract(w).root))
                    .collect()
            });
        }
        // Ids are dense and unique after dedup, so the build cannot fail.
        let tree = timer.time(Stage::BuildTree, || {
            SuffixTree::build(&sequences).expect("deduplicated ids are unique")
        });
        let base = timer.time(Stage::BaseClusters, || extract_base_clusters(&tree, sim));
        let top = timer.time(Stage::SelectTopK, || select_top_k(&base, sim));
        let finals = timer.time(Stage::Merge, || merge_clusters(&top, sim));
        let clusters = match scheme {
            Scheme::New => {
                let signatures = timer.time(Stage::Roots, || root_signatures(&finals, extractor));
                timer.time(Stage::Consolidate, || {
                    group_by_signature(&finals, &signatures, &self.config.significance)
                })
            }
            Scheme::StemFirst => timer.time(Stage::Consolidate, || {
                without_grouping(&finals, extractor, &self.config.significance)
            }),
        };

        let clustered: BTreeSet<u32> = clusters
            .iter()
            .flat_map(|c| c.members.iter().copied())
            .collect();
        let unclustered = snippets
            .iter()
            .map(|s| s.id)
            .filter(|id| !clustered.contains(id))
            .collect();
        ClusterResult {
            query: query.to_string(),
            scheme,
            clusters,
            unclustered,
            snippets,
            timings: timer.timings,
        }
    }
}

/// Reads and parses a snippet file, choosing the format by extension.
pub fn read_snippet_file(path: &Path) -> Result<Vec<Snippet>, PipelineError> {
    let bytes = std::fs::read(path).map_err(|source| PipelineError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_snippets(&bytes, SnippetFormat::from_path(path)).map_err(|source| PipelineError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// One-shot convenience: cluster `snippets` under `config`.
pub fn run_pipeline(
    query: &str,
    snippets: Vec<Snippet>,
    config: PipelineConfig,
) -> Result<ClusterResult, ConfigError> {
    Ok(Pipeline::new(config)?.cluster(query, snippets))
}
