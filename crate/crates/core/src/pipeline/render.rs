//! Plain-text cluster tree, one cluster per line with its merged labels
//! indented beneath. Words are written in logical order; the terminal does
//! any bidi reordering.
//!
//! ```text
//! query: التعليم
//! scheme: new
//! + التعليم والتربية (2) [0 1]
//!   - التعليم والتربية
//! unclustered: [2]
//! ```

use serde::{Deserialize, Serialize};

use super::Scheme;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeCluster {
    pub display_label: String,
    pub members: Vec<u32>,
    pub merged_from: Vec<String>,
}

/// The parts of a result shown in the tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeView {
    pub query: String,
    pub scheme: Scheme,
    pub clusters: Vec<TreeCluster>,
    pub unclustered: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct TreeParseError {
    pub line: usize,
    pub message: String,
}

fn ids(list: &[u32]) -> String {
    let parts: Vec<String> = list.iter().map(u32::to_string).collect();
    format!("[{}]", parts.join(" "))
}

pub fn render_tree(view: &TreeView) -> String {
    let mut out = format!("query: {}\nscheme: {}\n", view.query.trim(), view.scheme);
    for c in &view.clusters {
        out.push_str(&format!(
            "+ {} ({}) {}\n",
            c.display_label,
            c.members.len(),
            ids(&c.members)
        ));
        for label in &c.merged_from {
            out.push_str(&format!("  - {label}\n"));
        }
    }
    out.push_str(&format!("unclustered: {}\n", ids(&view.unclustered)));
    out
}

fn parse_ids(text: &str, line: usize) -> Result<Vec<u32>, TreeParseError> {
    let err = |message: String| TreeParseError { line, message };
    let inner = text
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| err(format!("expected [ids], got {text:?}")))?;
    inner
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(format!("bad id {t:?}"))))
        .collect()
}

pub fn parse_tree(text: &str) -> Result<TreeView, TreeParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut header = |key: &str| {
        let (n, line) = lines.next().ok_or(TreeParseError {
            line: 0,
            message: format!("missing {key} line"),
        })?;
        line.strip_prefix(key)
            .and_then(|r| r.strip_prefix(": "))
            .map(|v| (n, v.to_string()))
            .ok_or(TreeParseError {
                line: n,
                message: format!("expected {key}:"),
            })
    };
    let (_, query) = header("query")?;
    let (n, scheme) = header("scheme")?;
    let scheme = scheme
        .parse()
        .map_err(|e: crate::InvalidValue| TreeParseError {
            line: n,
            message: e.to_string(),
        })?;

    let mut clusters: Vec<TreeCluster> = Vec::new();
    for (n, line) in lines {
        if let Some(rest) = line.strip_prefix("+ ") {
            let err = |message: &str| TreeParseError {
                line: n,
                message: message.to_string(),
            };
            let open = rest.rfind(" [").ok_or_else(|| err("missing member list"))?;
            let members = parse_ids(&rest[open + 1..], n)?;
            let head = &rest[..open];
            let paren = head
                .rfind(" (")
                .ok_or_else(|| err("missing member count"))?;
            let count: usize = head[paren + 2..]
                .strip_suffix(')')
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| err("bad member count"))?;
            if count != members.len() {
                return Err(err("member count does not match member list"));
            }
            clusters.push(TreeCluster {
                display_label: head[..paren].to_string(),
                members,
                merged_from: Vec::new(),
            });
        } else if let Some(label) = line.strip_prefix("  - ") {
            clusters
                .last_mut()
                .ok_or(TreeParseError {
                    line: n,
                    message: "label outside a cluster".into(),
                })?
                .merged_from
                .push(label.to_string());
        } else if let Some(rest) = line.strip_prefix("unclustered: ") {
            return Ok(TreeView {
                query,
                scheme,
                clusters,
                unclustered: parse_ids(rest, n)?,
            });
        } else {
            return Err(TreeParseError {
                line: n,
                message: format!("unexpected line {line:?}"),
            });
        }
    }
    Err(TreeParseError {
        line: 0,
        message: "missing unclustered line".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let view = TreeView {
            query: "التعليم".into(),
            scheme: Scheme::New,
            clusters: vec![
                TreeCluster {
                    display_label: "التعليم والتربية".into(),
                    members: vec![0, 1],
                    merged_from: vec!["التعليم والتربية".into(), "تعليم".into()],
                },
                TreeCluster {
                    display_label: "x".into(),
                    members: vec![3],
                    merged_from: vec!["x".into()],
                },
            ],
            unclustered: vec![],
        };
        let text = render_tree(&view);
        assert!(text.contains("+ التعليم والتربية (2) [0 1]\n  - التعليم والتربية\n  - تعليم\n"));
        assert_eq!(parse_tree(&text).unwrap(), view);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_tree("").is_err());
        assert!(parse_tree("query: q\nscheme: new\n").is_err());
        let bad = "query: q\nscheme: new\n+ a (3) [1]\nunclustered: []\n";
        assert_eq!(parse_tree(bad).unwrap_err().line, 3);
    }
}
