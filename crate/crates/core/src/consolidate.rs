//! Post-clustering consolidation: final clusters whose top labels share a
//! root signature are merged, then small clusters are dropped.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::arabic::RootExtractor;
use crate::stc::FinalCluster;
use crate::InvalidValue;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignificanceConfig {
    pub min_members: usize,
    pub max_clusters: usize,
}

impl Default for SignificanceConfig {
    fn default() -> Self {
        Self {
            min_members: 2,
            max_clusters: 15,
        }
    }
}

impl SignificanceConfig {
    pub fn validate(&self) -> Result<(), InvalidValue> {
        if self.min_members == 0 {
            return Err(InvalidValue::new("min_members", "must be at least 1"));
        }
        if self.max_clusters == 0 {
            return Err(InvalidValue::new("max_clusters", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsolidatedCluster {
    /// Top label of the best-scoring merged cluster, as it appears in the text.
    pub display_label: String,
    /// Sorted roots of the display label's words.
    pub root_signature: Vec<String>,
    pub members: Vec<u32>,
    /// Top label of every final cluster folded into this one, best first.
    pub merged_from: Vec<String>,
    /// Every phrase of the merged clusters, without repeats, best first.
    pub labels: Vec<String>,
    pub score: f64,
}

impl From<&ConsolidatedCluster> for FinalCluster {
    fn from(c: &ConsolidatedCluster) -> Self {
        let mut labels: Vec<Vec<String>> = vec![split(&c.display_label)];
        labels.extend(
            c.labels
                .iter()
                .filter(|l| **l != c.display_label)
                .map(|l| split(l)),
        );
        FinalCluster {
            labels,
            members: c.members.clone(),
            score: c.score,
        }
    }
}

fn split(label: &str) -> Vec<String> {
    label.split_whitespace().map(str::to_string).collect()
}

/// Groups `finals` by the root signature of their top label and merges each
/// group, then applies the significance filter.
pub fn consolidate(
    finals: &[FinalCluster],
    extractor: &RootExtractor,
    config: &SignificanceConfig,
) -> Vec<ConsolidatedCluster> {
    group_by_signature(finals, &root_signatures(finals, extractor), config)
}

/// Root signature of each final cluster's top label.
pub fn root_signatures(finals: &[FinalCluster], extractor: &RootExtractor) -> Vec<Vec<String>> {
    finals
        .iter()
        .map(|f| extractor.root_signature(f.top_label()))
        .collect()
}

/// [`consolidate`] with precomputed signatures, one per final cluster.
pub fn group_by_signature(
    finals: &[FinalCluster],
    signatures: &[Vec<String>],
    config: &SignificanceConfig,
) -> Vec<ConsolidatedCluster> {
    assert_eq!(finals.len(), signatures.len(), "one signature per cluster");
    let mut groups: Vec<(&Vec<String>, Vec<&FinalCluster>)> = Vec::new();
    let mut slot: HashMap<&Vec<String>, usize> = HashMap::new();
    for (f, signature) in finals.iter().zip(signatures) {
        let i = *slot.entry(signature).or_insert_with(|| {
            groups.push((signature, Vec::new()));
            groups.len() - 1
        });
        groups[i].1.push(f);
    }

    let merged = groups
        .into_iter()
        .map(|(signature, mut group)| {
            // Stable: equal scores keep input order.
            group.sort_by(|a, b| b.score.total_cmp(&a.score));
            merge_group(signature.clone(), &group)
        })
        .collect();
    filter_significant(merged, config)
}

/// Wraps each final cluster on its own, with no root grouping. Used when the
/// tokens were already reduced to roots before clustering.
pub fn without_grouping(
    finals: &[FinalCluster],
    extractor: &RootExtractor,
    config: &SignificanceConfig,
) -> Vec<ConsolidatedCluster> {
    let each = finals
        .iter()
        .map(|f| merge_group(extractor.root_signature(f.top_label()), &[f]))
        .collect();
    filter_significant(each, config)
}

fn merge_group(root_signature: Vec<String>, group: &[&FinalCluster]) -> ConsolidatedCluster {
    let mut members: Vec<u32> = group
        .iter()
        .flat_map(|f| f.members.iter().copied())
        .collect();
    members.sort_unstable();
    members.dedup();
    let mut labels: Vec<String> = Vec::new();
    for f in group {
        for l in &f.labels {
            let l = l.join(" ");
            if !labels.contains(&l) {
                labels.push(l);
            }
        }
    }
    ConsolidatedCluster {
        display_label: group[0].top_label().join(" "),
        root_signature,
        members,
        merged_from: group.iter().map(|f| f.top_label().join(" ")).collect(),
        labels,
        score: group[0].score,
    }
}

fn filter_significant(
    mut clusters: Vec<ConsolidatedCluster>,
    config: &SignificanceConfig,
) -> Vec<ConsolidatedCluster> {
    clusters.retain(|c| c.members.len() >= config.min_members);
    clusters.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.display_label.cmp(&b.display_label))
    });
    clusters.truncate(config.max_clusters);
    clusters
}
