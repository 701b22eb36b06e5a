//! Word-level generalized suffix tree.
//!
//! All documents are concatenated into one symbol string in which every word
//! is interned to an integer and every document is followed by its own
//! terminator. Title/body breaks get a sentinel of their own, so no path
//! through the tree can cross them. The tree is then built with Ukkonen's
//! online algorithm, which is linear in the total number of symbols.
//!
//! Because every sentinel is unique, no internal node's path can contain
//! one: a path through a sentinel would be a repeated substring. Leaf edges
//! run to the end of the whole text during construction and are cut at their
//! first sentinel when reported.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::arabic::TokenSequence;

pub type NodeId = usize;

const ROOT: NodeId = 0;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("document id {0} appears more than once")]
    DuplicateDocument(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Symbol {
    Word(u32),
    /// Terminator or title/body marker; the payload only makes it unique.
    Sentinel(u32),
}

/// Which suffix a leaf spells: document id and symbol offset inside that
/// document (terminators and break markers count as symbols).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct LeafIndex {
    pub doc_id: u32,
    pub offset: u32,
}

#[derive(Debug, Clone)]
struct Node {
    /// Edge into this node is `text[start..end]`; leaf edges are already
    /// truncated at their first sentinel.
    start: usize,
    end: usize,
    /// Words on the path from the root, up to and including this edge.
    depth: usize,
    children: Vec<NodeId>,
    docs: Vec<u32>,
    leaf: Option<LeafIndex>,
}

#[derive(Debug, Clone)]
pub struct SuffixTree {
    text: Vec<Symbol>,
    vocab: Vec<String>,
    nodes: Vec<Node>,
    doc_ids: Vec<u32>,
}

impl SuffixTree {
    /// Builds the tree over every non-empty sequence. Empty sequences are skipped.
    pub fn build(sequences: &[TokenSequence]) -> Result<Self, TreeError> {
        let mut seen = HashSet::new();
        let mut index: HashMap<&str, u32> = HashMap::new();
        let mut vocab = Vec::new();
        let mut text = Vec::new();
        // For every text position: owning document and offset within it.
        let mut owner: Vec<(u32, u32)> = Vec::new();
        let mut doc_ids = Vec::new();
        let mut sentinels = 0u32;

        for seq in sequences {
            if !seen.insert(seq.doc_id) {
                return Err(TreeError::DuplicateDocument(seq.doc_id));
            }
            if seq.is_empty() {
                continue;
            }
            doc_ids.push(seq.doc_id);
            let doc_start = text.len();
            let mut breaks = seq.breaks.iter().peekable();
            for (i, token) in seq.tokens.iter().enumerate() {
                if breaks.next_if(|&&b| b == i).is_some() {
                    text.push(Symbol::Sentinel(sentinels));
                    sentinels += 1;
                }
                let next = vocab.len() as u32;
                let id = *index.entry(token.surface.as_str()).or_insert_with(|| {
                    vocab.push(token.surface.clone());
                    next
                });
                text.push(Symbol::Word(id));
            }
            text.push(Symbol::Sentinel(sentinels));
            sentinels += 1;
            owner.extend((0..text.len() - doc_start).map(|off| (seq.doc_id, off as u32)));
        }
        doc_ids.sort_unstable();

        let mut rank = vec![0u32; vocab.len()];
        let mut by_word: Vec<usize> = (0..vocab.len()).collect();
        by_word.sort_by(|&a, &b| vocab[a].cmp(&vocab[b]));
        for (r, w) in by_word.into_iter().enumerate() {
            rank[w] = r as u32;
        }

        let raw = ukkonen(&text);
        let nodes = finish(&text, &owner, &rank, raw);
        Ok(Self {
            text,
            vocab,
            nodes,
            doc_ids,
        })
    }

    pub fn root(&self) -> NodeId {
        ROOT
    }

    /// Sorted ids of the documents that went into the tree.
    pub fn documents(&self) -> &[u32] {
        &self.doc_ids
    }

    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// One leaf per suffix, i.e. per symbol including terminators and break markers.
    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.leaf.is_some()).count()
    }

    pub fn symbol_count(&self) -> usize {
        self.text.len()
    }

    pub fn is_leaf(&self, node: NodeId) -> bool {
        self.nodes[node].leaf.is_some()
    }

    pub fn leaf_index(&self, node: NodeId) -> Option<LeafIndex> {
        self.nodes[node].leaf
    }

    /// Children ordered by first word; edges that start with a terminator come last.
    pub fn children(&self, node: NodeId) -> &[NodeId] {
        &self.nodes[node].children
    }

    /// Words on the edge into `node`. Empty for the root and for leaves that
    /// hang off their parent by a terminator alone.
    pub fn edge_label(&self, node: NodeId) -> Vec<&str> {
        let n = &self.nodes[node];
        self.words(n.start, n.end)
    }

    /// Words from the root down to `node`, terminators excluded.
    pub fn phrase(&self, node: NodeId) -> Vec<&str> {
        let n = &self.nodes[node];
        self.words(n.end - n.depth, n.end)
    }

    pub fn phrase_len(&self, node: NodeId) -> usize {
        self.nodes[node].depth
    }

    /// Sorted ids of the documents whose suffixes pass through `node`.
    pub fn doc_set(&self, node: NodeId) -> &[u32] {
        &self.nodes[node].docs
    }

    /// Every internal node except the root, in pre-order with sorted children.
    pub fn internal_nodes(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack: Vec<NodeId> = self.nodes[ROOT].children.iter().rev().copied().collect();
        while let Some(id) = stack.pop() {
            if self.is_leaf(id) {
                continue;
            }
            out.push(id);
            stack.extend(self.nodes[id].children.iter().rev());
        }
        out
    }

    /// Indented `node:<phrase> doc:(<ids>)` listing of the internal nodes.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        self.dump_into(ROOT, 0, &mut out);
        out
    }

    fn dump_into(&self, node: NodeId, indent: usize, out: &mut String) {
        for &child in &self.nodes[node].children {
            if self.is_leaf(child) {
                continue;
            }
            let docs: Vec<String> = self.doc_set(child).iter().map(u32::to_string).collect();
            let _ = writeln!(
                out,
                "{:indent$}node:{} doc:({})",
                "",
                self.phrase(child).join(" "),
                docs.join(","),
                indent = indent * 2
            );
            self.dump_into(child, indent + 1, out);
        }
    }

    fn words(&self, start: usize, end: usize) -> Vec<&str> {
        self.text[start..end]
            .iter()
            .map(|s| match s {
                Symbol::Word(w) => self.vocab[*w as usize].as_str(),
                Symbol::Sentinel(_) => unreachable!("sentinel inside a reported label"),
            })
            .collect()
    }
}

struct RawNode {
    start: usize,
    /// `None` for leaves: their edge is open-ended to the end of the text.
    end: Option<usize>,
    link: NodeId,
    children: HashMap<Symbol, NodeId>,
    suffix_start: Option<usize>,
}

impl RawNode {
    fn new(start: usize, end: Option<usize>) -> Self {
        Self {
            start,
            end,
            link: ROOT,
            children: HashMap::new(),
            suffix_start: None,
        }
    }
}

fn ukkonen(text: &[Symbol]) -> Vec<RawNode> {
    let mut nodes = vec![RawNode::new(0, Some(0))];
    let mut active_node = ROOT;
    let mut active_edge = 0usize;
    let mut active_len = 0usize;
    let mut remainder = 0usize;

    for pos in 0..text.len() {
        remainder += 1;
        let mut pending_link: Option<NodeId> = None;

        while remainder > 0 {
            if active_len == 0 {
                active_edge = pos;
            }
            let first = text[active_edge];
            match nodes[active_node].children.get(&first).copied() {
                None => {
                    let leaf = nodes.len();
                    let mut node = RawNode::new(pos, None);
                    node.suffix_start = Some(pos + 1 - remainder);
                    nodes.push(node);
                    nodes[active_node].children.insert(first, leaf);
                    if let Some(p) = pending_link.take() {
                        nodes[p].link = active_node;
                    }
                }
                Some(next) => {
                    let edge_len = nodes[next].end.unwrap_or(pos + 1) - nodes[next].start;
                    if active_len >= edge_len {
                        active_edge += edge_len;
                        active_len -= edge_len;
                        active_node = next;
                        continue;
                    }
                    if text[nodes[next].start + active_len] == text[pos] {
                        if let Some(p) = pending_link.take() {
                            nodes[p].link = active_node;
                        }
                        active_len += 1;
                        break;
                    }
                    let split_at = nodes[next].start + active_len;
                    let mid = nodes.len();
                    nodes.push(RawNode::new(nodes[next].start, Some(split_at)));
                    nodes[active_node].children.insert(first, mid);

                    let leaf = nodes.len();
                    let mut node = RawNode::new(pos, None);
                    node.suffix_start = Some(pos + 1 - remainder);
                    nodes.push(node);
                    nodes[mid].children.insert(text[pos], leaf);

                    nodes[next].start = split_at;
                    nodes[mid].children.insert(text[split_at], next);

                    if let Some(p) = pending_link.replace(mid) {
                        nodes[p].link = mid;
                    }
                }
            }

            remainder -= 1;
            if active_node == ROOT && active_len > 0 {
                active_len -= 1;
                active_edge = pos + 1 - remainder;
            } else if active_node != ROOT {
                active_node = nodes[active_node].link;
            }
        }
    }
    nodes
}

/// Closes leaf edges, sorts children, fills in depths and materializes doc
/// sets bottom-up.
fn finish(text: &[Symbol], owner: &[(u32, u32)], rank: &[u32], raw: Vec<RawNode>) -> Vec<Node> {
    // Position of the first sentinel at or after each index.
    let mut next_sentinel = vec![text.len(); text.len() + 1];
    for i in (0..text.len()).rev() {
        next_sentinel[i] = match text[i] {
            Symbol::Sentinel(_) => i,
            Symbol::Word(_) => next_sentinel[i + 1],
        };
    }

    let sort_key = |sym: Symbol| match sym {
        Symbol::Word(w) => (0u8, rank[w as usize]),
        Symbol::Sentinel(s) => (1u8, s),
    };

    let mut nodes: Vec<Node> = raw
        .iter()
        .map(|r| {
            let end = match r.end {
                Some(e) => e,
                None => next_sentinel[r.start],
            };
            Node {
                start: r.start,
                end,
                depth: 0,
                children: r.children.values().copied().collect(),
                docs: Vec::new(),
                leaf: r.suffix_start.map(|s| LeafIndex {
                    doc_id: owner[s].0,
                    offset: owner[s].1,
                }),
            }
        })
        .collect();

    // Pre-order pass: depths, plus an order for the bottom-up pass.
    let mut order = Vec::with_capacity(nodes.len());
    let mut stack = vec![ROOT];
    while let Some(id) = stack.pop() {
        order.push(id);
        let children = std::mem::take(&mut nodes[id].children);
        for &c in &children {
            nodes[c].depth = nodes[id].depth + (nodes[c].end - nodes[c].start);
        }
        stack.extend(&children);
        nodes[id].children = children;
    }

    for id in order.into_iter().rev() {
        if let Some(leaf) = nodes[id].leaf {
            nodes[id].docs = vec![leaf.doc_id];
            continue;
        }
        let mut docs: Vec<u32> = nodes[id]
            .children
            .iter()
            .flat_map(|&c| nodes[c].docs.iter().copied())
            .collect();
        docs.sort_unstable();
        docs.dedup();
        nodes[id].docs = docs;
    }

    // The root has no edge; its entry is never used as a sort key.
    let first: Vec<Symbol> = raw
        .iter()
        .map(|r| {
            text.get(r.start)
                .copied()
                .unwrap_or(Symbol::Sentinel(u32::MAX))
        })
        .collect();
    for node in &mut nodes {
        node.children.sort_by_key(|&c| sort_key(first[c]));
    }
    nodes
}
