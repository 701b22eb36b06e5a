use serde::{Deserialize, Serialize};

use super::{ClusterResult, Pipeline, Scheme};
use crate::arabic::{RootExtractor, TokenSequence};
use crate::consolidate::ConsolidatedCluster;
use crate::snippet::Snippet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeSummary {
    pub scheme: Scheme,
    pub cluster_count: usize,
    /// Mean display-label length in words.
    pub mean_label_length: f64,
    /// Share of display labels found word for word in a member snippet.
    pub surface_label_rate: f64,
    /// Share of display labels made only of roots and found in no snippet.
    pub bare_root_fraction: f64,
    pub clusters: Vec<ConsolidatedCluster>,
}

/// Side-by-side outcome of clustering one snippet set under both schemes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeReport {
    pub query: String,
    pub snippet_count: usize,
    pub stem_first: SchemeSummary,
    pub new_scheme: SchemeSummary,
}

/// True if `label` appears as a contiguous run of cleaned words in any of
/// the given documents.
pub fn label_occurs_in<'a>(label: &str, docs: impl IntoIterator<Item = &'a TokenSequence>) -> bool {
    let words: Vec<&str> = label.split_whitespace().collect();
    docs.into_iter().any(|d| d.contains_phrase(&words))
}

pub fn compare_schemes(pipeline: &Pipeline, query: &str, snippets: Vec<Snippet>) -> SchemeReport {
    let stem_first = pipeline
        .with_scheme(Scheme::StemFirst)
        .cluster(query, snippets.clone());
    let new_scheme = pipeline.with_scheme(Scheme::New).cluster(query, snippets);
    SchemeReport {
        query: query.to_string(),
        snippet_count: new_scheme.snippets.len(),
        stem_first: summarize(pipeline, stem_first),
        new_scheme: summarize(pipeline, new_scheme),
    }
}

fn summarize(pipeline: &Pipeline, result: ClusterResult) -> SchemeSummary {
    let cleaner = &pipeline.resources().cleaner;
    let extractor = &pipeline.resources().extractor;
    let sequences: Vec<TokenSequence> = result
        .snippets
        .iter()
        .map(|s| cleaner.to_sequence(s))
        .collect();

    let n = result.clusters.len();
    let ratio = |count: usize| if n == 0 { 0.0 } else { count as f64 / n as f64 };
    let words: usize = result
        .clusters
        .iter()
        .map(|c| c.display_label.split_whitespace().count())
        .sum();
    let surface = result
        .clusters
        .iter()
        .filter(|c| {
            label_occurs_in(
                &c.display_label,
                c.members.iter().map(|&m| &sequences[m as usize]),
            )
        })
        .count();
    let bare = result
        .clusters
        .iter()
        .filter(|c| {
            is_bare_root(&c.display_label, extractor)
                && !label_occurs_in(&c.display_label, &sequences)
        })
        .count();

    SchemeSummary {
        scheme: result.scheme,
        cluster_count: n,
        mean_label_length: ratio(words),
        surface_label_rate: ratio(surface),
        bare_root_fraction: ratio(bare),
        clusters: result.clusters,
    }
}

fn is_bare_root(label: &str, extractor: &RootExtractor) -> bool {
    label
        .split_whitespace()
        .all(|w| extractor.extract(w).root == w)
}
