use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::arabic::{CleanOptions, RootExtractor, RootLexicon, StopWordList, TextCleaner};
use crate::consolidate::SignificanceConfig;
use crate::snippet::cache::hash_parts;
use crate::snippet::{DEFAULT_MAX_RESULTS, DEFAULT_TTL, FIXTURE_PROVIDER_NAME};
use crate::stc::SimilarityConfig;
use crate::InvalidValue;

/// Environment variable naming the config file when no path is given.
pub const CONFIG_ENV: &str = "STCB_CONFIG";

/// Where roots enter the pipeline.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Cluster surface forms, then merge clusters whose labels share roots.
    #[default]
    New,
    /// Reduce every token to its root before building the tree.
    StemFirst,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::New => "new",
            Scheme::StemFirst => "stem-first",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = InvalidValue;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "new" => Ok(Scheme::New),
            "stem-first" => Ok(Scheme::StemFirst),
            other => Err(InvalidValue::new(
                "scheme",
                format!("expected \"new\" or \"stem-first\", got {other:?}"),
            )),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("bad config{}: {source}", .path.as_ref().map(|p| format!(" {}", p.display())).unwrap_or_default())]
    Parse {
        path: Option<PathBuf>,
        source: toml::de::Error,
    },
    #[error(transparent)]
    Invalid(#[from] InvalidValue),
    #[error("{field} points at {path}, which does not exist")]
    MissingFile { field: &'static str, path: PathBuf },
    #[error("cannot load {field} from {path}: {source}")]
    Resource {
        field: &'static str,
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Everything that shapes a pipeline run. Read from TOML; unknown keys are errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub scheme: Scheme,
    pub provider_name: String,
    pub max_results: usize,
    /// Directory served by the fixture provider.
    pub corpus_dir: Option<PathBuf>,
    pub cache_dir: PathBuf,
    pub cache_ttl_secs: u64,
    /// Replaces the bundled stop-word list.
    pub stop_word_path: Option<PathBuf>,
    /// Replaces the bundled root lexicon.
    pub root_lexicon_path: Option<PathBuf>,
    pub keep_latin: bool,
    pub fold_alef_hamza: bool,
    pub similarity: SimilarityConfig,
    pub significance: SignificanceConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::New,
            provider_name: FIXTURE_PROVIDER_NAME.to_string(),
            max_results: DEFAULT_MAX_RESULTS,
            corpus_dir: None,
            cache_dir: std::env::temp_dir().join("stcb-cache"),
            cache_ttl_secs: DEFAULT_TTL.as_secs(),
            stop_word_path: None,
            root_lexicon_path: None,
            keep_latin: false,
            fold_alef_hamza: false,
            similarity: SimilarityConfig::default(),
            significance: SignificanceConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// Parses TOML. Relative paths are resolved against `base_dir` when given.
    pub fn from_toml_str(text: &str, base_dir: Option<&Path>) -> Result<Self, ConfigError> {
        let mut config: Self =
            toml::from_str(text).map_err(|source| ConfigError::Parse { path: None, source })?;
        if let Some(base) = base_dir {
            config.resolve_paths(base);
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, Some(base)).map_err(|e| match e {
            ConfigError::Parse { source, .. } => ConfigError::Parse {
                path: Some(path.to_path_buf()),
                source,
            },
            other => other,
        })
    }

    /// Loads `explicit` if given, else the file named by `STCB_CONFIG`, else defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self, ConfigError> {
        if let Some(path) = explicit {
            return Self::load(path);
        }
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::default()),
        }
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [
            self.corpus_dir.as_mut(),
            self.stop_word_path.as_mut(),
            self.root_lexicon_path.as_mut(),
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        fix(&mut self.cache_dir);
    }

    /// Range checks plus existence of every referenced input file.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.similarity.validate()?;
        self.significance.validate()?;
        if self.provider_name.trim().is_empty() {
            return Err(InvalidValue::new("provider_name", "must not be empty").into());
        }
        for (field, path) in [
            ("stop_word_path", &self.stop_word_path),
            ("root_lexicon_path", &self.root_lexicon_path),
            ("corpus_dir", &self.corpus_dir),
        ] {
            if let Some(path) = path {
                if !path.exists() {
                    return Err(ConfigError::MissingFile {
                        field,
                        path: path.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn cache_ttl(&self) -> Duration {
        Duration::from_secs(self.cache_ttl_secs)
    }

    /// Stable hash of every setting that can change a clustering result.
    pub fn fingerprint(&self) -> String {
        let relevant = serde_json::json!({
            "scheme": self.scheme,
            "stop_word_path": self.stop_word_path,
            "root_lexicon_path": self.root_lexicon_path,
            "keep_latin": self.keep_latin,
            "fold_alef_hamza": self.fold_alef_hamza,
            "similarity": self.similarity,
            "significance": self.significance,
        });
        hash_parts(&[&relevant.to_string()])
    }

    pub fn clean_options(&self) -> CleanOptions {
        CleanOptions {
            keep_latin: self.keep_latin,
            fold_alef_hamza: self.fold_alef_hamza,
        }
    }
}

/// Immutable linguistic resources shared by every run.
#[derive(Debug, Clone)]
pub struct Resources {
    pub cleaner: TextCleaner,
    pub extractor: RootExtractor,
}

impl Resources {
    pub fn load(config: &PipelineConfig) -> Result<Self, ConfigError> {
        let stop_words = match &config.stop_word_path {
            Some(path) => StopWordList::load(path).map_err(|source| ConfigError::Resource {
                field: "stop_word_path",
                path: path.clone(),
                source,
            })?,
            None => StopWordList::bundled(),
        };
        let lexicon = match &config.root_lexicon_path {
            Some(path) => RootLexicon::load(path).map_err(|source| ConfigError::Resource {
                field: "root_lexicon_path",
                path: path.clone(),
                source,
            })?,
            None => RootLexicon::bundled(),
        };
        Ok(Self {
            cleaner: TextCleaner::new(stop_words, config.clean_options()),
            extractor: RootExtractor::new(lexicon),
        })
    }
}
