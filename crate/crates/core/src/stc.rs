//! Suffix Tree Clustering: base clusters from tree nodes, top-k selection,
//! overlap graph and connected-component merging.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::suffix_tree::SuffixTree;
use crate::InvalidValue;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimilarityConfig {
    /// Overlap threshold for joining two base clusters, inclusive.
    pub alpha_sim: f64,
    pub k_top: usize,
    pub min_docs: usize,
    /// Weight of phrases longer than six words.
    pub phrase_cap_weight: f64,
    /// Weight of one-word phrases. Zero gives the strict formula.
    pub single_word_weight: f64,
    /// Reported phrases are cut to this many words; scores use the full length.
    pub max_phrase_words: usize,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        Self {
            alpha_sim: 0.6,
            k_top: 100,
            min_docs: 2,
            phrase_cap_weight: 6.0,
            single_word_weight: 0.5,
            max_phrase_words: 20,
        }
    }
}

impl SimilarityConfig {
    pub fn validate(&self) -> Result<(), InvalidValue> {
        if !(self.alpha_sim > 0.0 && self.alpha_sim <= 1.0) {
            return Err(InvalidValue::new("alpha_sim", "must be in (0, 1]"));
        }
        if self.k_top == 0 {
            return Err(InvalidValue::new("k_top", "must be positive"));
        }
        if self.min_docs < 2 {
            return Err(InvalidValue::new("min_docs", "must be at least 2"));
        }
        if !(self.phrase_cap_weight >= 0.0 && self.phrase_cap_weight.is_finite()) {
            return Err(InvalidValue::new(
                "phrase_cap_weight",
                "must be a non-negative number",
            ));
        }
        if !(self.single_word_weight >= 0.0 && self.single_word_weight.is_finite()) {
            return Err(InvalidValue::new(
                "single_word_weight",
                "must be a non-negative number",
            ));
        }
        if self.max_phrase_words == 0 {
            return Err(InvalidValue::new("max_phrase_words", "must be positive"));
        }
        Ok(())
    }
}

/// F(P): rewards multi-word phrases up to six words, flat beyond.
pub fn phrase_weight(length: usize, config: &SimilarityConfig) -> f64 {
    match length {
        0 => 0.0,
        1 => config.single_word_weight,
        2..=6 => length as f64,
        _ => config.phrase_cap_weight,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseCluster {
    pub phrase: Vec<String>,
    /// Sorted, distinct snippet ids.
    pub docs: Vec<u32>,
    pub score: f64,
}

impl BaseCluster {
    pub fn new(phrase: Vec<String>, docs: Vec<u32>, config: &SimilarityConfig) -> Self {
        let score = docs.len() as f64 * phrase_weight(phrase.len(), config);
        Self {
            phrase,
            docs,
            score,
        }
    }

    pub fn label(&self) -> String {
        self.phrase.join(" ")
    }
}

/// Score descending, then phrase length descending, then phrase order.
fn rank_order(a: &BaseCluster, b: &BaseCluster) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| b.phrase.len().cmp(&a.phrase.len()))
        .then_with(|| a.phrase.cmp(&b.phrase))
}

/// One base cluster per internal node shared by at least `min_docs`
/// documents, ordered by score then phrase.
pub fn extract_base_clusters(tree: &SuffixTree, config: &SimilarityConfig) -> Vec<BaseCluster> {
    let mut out: Vec<BaseCluster> = tree
        .internal_nodes()
        .into_iter()
        .filter(|&n| tree.doc_set(n).len() >= config.min_docs)
        .map(|n| {
            let docs = tree.doc_set(n).to_vec();
            let score = docs.len() as f64 * phrase_weight(tree.phrase_len(n), config);
            let mut phrase: Vec<String> = tree.phrase(n).into_iter().map(str::to_string).collect();
            phrase.truncate(config.max_phrase_words);
            BaseCluster {
                phrase,
                docs,
                score,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.phrase.cmp(&b.phrase))
    });
    out
}

/// The `k_top` best non-zero clusters in rank order.
pub fn select_top_k(clusters: &[BaseCluster], config: &SimilarityConfig) -> Vec<BaseCluster> {
    let mut kept: Vec<BaseCluster> = clusters.iter().filter(|c| c.score > 0.0).cloned().collect();
    kept.sort_by(rank_order);
    kept.truncate(config.k_top);
    kept
}

fn intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// 1 when each cluster shares at least `alpha_sim` of its documents with
/// the other, else 0.
pub fn similarity(b1: &BaseCluster, b2: &BaseCluster, alpha_sim: f64) -> u8 {
    if b1.docs.is_empty() || b2.docs.is_empty() {
        return 0;
    }
    let inter = intersection_len(&b1.docs, &b2.docs) as f64;
    // Divide rather than multiply: 0.6 * 5 is slightly above 3 in binary.
    let linked =
        inter / b1.docs.len() as f64 >= alpha_sim && inter / b2.docs.len() as f64 >= alpha_sim;
    u8::from(linked)
}

/// Base-cluster graph: an edge joins every pair with similarity 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterGraph {
    pub nodes: Vec<BaseCluster>,
    pub edges: Vec<(usize, usize)>,
}

impl ClusterGraph {
    pub fn build(nodes: Vec<BaseCluster>, alpha_sim: f64) -> Self {
        let mut edges = Vec::new();
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                if similarity(&nodes[i], &nodes[j], alpha_sim) == 1 {
                    edges.push((i, j));
                }
            }
        }
        Self { nodes, edges }
    }

    /// Node indices of each connected component, components ordered by their
    /// first node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.nodes.len());
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; self.nodes.len()];
        for i in 0..self.nodes.len() {
            let root = uf.find(i);
            if slot[root] == usize::MAX {
                slot[root] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[root]].push(i);
        }
        groups
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalCluster {
    /// Phrases of the component's base clusters, best first.
    pub labels: Vec<Vec<String>>,
    /// Sorted union of the component's documents.
    pub members: Vec<u32>,
    /// Best base-cluster score in the component.
    pub score: f64,
}

impl FinalCluster {
    pub fn top_label(&self) -> &[String] {
        &self.labels[0]
    }
}

/// Connected components of the overlap graph over `selected`, each turned
/// into one final cluster. Ordered by score, then top label.
pub fn merge_clusters(selected: &[BaseCluster], config: &SimilarityConfig) -> Vec<FinalCluster> {
    let graph = ClusterGraph::build(selected.to_vec(), config.alpha_sim);
    let mut finals: Vec<FinalCluster> = graph
        .components()
        .into_iter()
        .map(|component| {
            let mut parts: Vec<&BaseCluster> = component.iter().map(|&i| &graph.nodes[i]).collect();
            parts.sort_by(|a, b| rank_order(a, b));
            let mut members: Vec<u32> = parts.iter().flat_map(|c| c.docs.iter().copied()).collect();
            members.sort_unstable();
            members.dedup();
            FinalCluster {
                labels: parts.iter().map(|c| c.phrase.clone()).collect(),
                members,
                score: parts[0].score,
            }
        })
        .collect();
    finals.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.top_label().cmp(b.top_label()))
    });
    finals
}
