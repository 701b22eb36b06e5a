//! Search-result snippets: parsing, deduplication, provider access and caching.

pub(crate) mod cache;
mod dedup;
mod jsonl;
mod provider;
mod xml;

use serde::{Deserialize, Serialize};

pub use cache::{CacheEntry, CacheError, SnippetCache, DEFAULT_TTL};
pub use dedup::{dedup_snippets, Deduplicated};
pub use jsonl::{parse_snippet_jsonl, write_snippet_jsonl, JsonlError};
pub use provider::{
    fetch, FixtureProvider, ProviderError, ProviderRegistry, ProviderRequest, SearchProvider,
    DEFAULT_MAX_RESULTS, FIXTURE_PROVIDER_NAME,
};
pub use xml::{parse_snippet_xml, write_snippet_xml, XmlError};

/// One search result as returned by a provider.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snippet {
    pub id: u32,
    pub url: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub body: String,
}

impl Snippet {
    pub fn new(
        id: u32,
        url: impl Into<String>,
        title: impl Into<String>,
        body: impl Into<String>,
    ) -> Self {
        Self {
            id,
            url: url.into(),
            title: title.into(),
            body: body.into(),
        }
    }

    /// A snippet with neither title nor body text carries nothing to cluster.
    pub fn is_blank(&self) -> bool {
        self.title.trim().is_empty() && self.body.trim().is_empty()
    }
}

/// Input formats accepted by [`parse_snippets`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnippetFormat {
    Xml,
    JsonLines,
}

impl SnippetFormat {
    /// Guesses the format from a file extension, defaulting to XML.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") | Some("json") => SnippetFormat::JsonLines,
            _ => SnippetFormat::Xml,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error(transparent)]
    Xml(#[from] XmlError),
    #[error(transparent)]
    Jsonl(#[from] JsonlError),
}

pub fn parse_snippets(bytes: &[u8], format: SnippetFormat) -> Result<Vec<Snippet>, ParseError> {
    Ok(match format {
        SnippetFormat::Xml => parse_snippet_xml(bytes)?,
        SnippetFormat::JsonLines => parse_snippet_jsonl(bytes)?,
    })
}
