use super::Snippet;

#[derive(Debug, thiserror::Error)]
#[error("JSON-lines snippet parse error at line {line}: {source}")]
pub struct JsonlError {
    pub line: usize,
    #[source]
    pub source: serde_json::Error,
}

/// One JSON object per line with keys `id`, `url`, `title`, `body`. Blank lines are skipped.
pub fn parse_snippet_jsonl(bytes: &[u8]) -> Result<Vec<Snippet>, JsonlError> {
    let text = String::from_utf8_lossy(bytes);
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|source| JsonlError {
                line: i + 1,
                source,
            })
        })
        .collect()
}

pub fn write_snippet_jsonl(snippets: &[Snippet]) -> String {
    let mut out = String::new();
    for s in snippets {
        // Serializing a plain struct of strings cannot fail.
        out.push_str(&serde_json::to_string(s).expect("snippet serializes"));
        out.push('\n');
    }
    out
}
