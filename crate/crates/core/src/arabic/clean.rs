use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::chars::{fold_alef_hamza, is_arabic_letter, is_diacritic, is_latin_letter, TATWEEL};
use crate::snippet::Snippet;

const BUNDLED_STOP_WORDS: &str = include_str!("../../data/stopwords_ar.txt");

/// A cleaned word together with its index inside its document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub position: usize,
}

/// Knobs for [`TextCleaner`]. Both default to off.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanOptions {
    /// Keep words written in Latin (or any other non-Arabic) script.
    pub keep_latin: bool,
    /// Map أ إ آ to bare alef in surface tokens.
    pub fold_alef_hamza: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopWordList {
    entries: HashSet<String>,
    fold_alef_hamza: bool,
}

impl StopWordList {
    /// One entry per line; blank lines and `#` comments are ignored.
    pub fn from_text(text: &str) -> Self {
        Self::from_text_with(text, false)
    }

    fn from_text_with(text: &str, fold: bool) -> Self {
        let entries = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| normalize_surface(l, fold))
            .collect();
        Self {
            entries,
            fold_alef_hamza: fold,
        }
    }

    pub fn bundled() -> Self {
        Self::from_text(BUNDLED_STOP_WORDS)
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        Ok(Self::from_text(&std::fs::read_to_string(path)?))
    }

    pub fn empty() -> Self {
        Self::from_text("")
    }

    /// Re-normalizes the entries for a cleaner that folds alef-hamza.
    fn with_folding(&self, fold: bool) -> Self {
        if fold == self.fold_alef_hamza {
            return self.clone();
        }
        Self {
            entries: self
                .entries
                .iter()
                .map(|e| normalize_surface(e, fold))
                .collect(),
            fold_alef_hamza: fold,
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries
            .contains(&normalize_surface(word, self.fold_alef_hamza))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn normalize_surface(word: &str, fold: bool) -> String {
    word.chars()
        .filter(|&c| c != TATWEEL && !is_diacritic(c))
        .map(|c| if fold { fold_alef_hamza(c) } else { c })
        .collect()
}

/// Stop-word list plus cleaning options; the unit the pipeline shares across requests.
#[derive(Debug, Clone)]
pub struct TextCleaner {
    stop_words: StopWordList,
    options: CleanOptions,
}

impl TextCleaner {
    pub fn new(stop_words: StopWordList, options: CleanOptions) -> Self {
        Self {
            stop_words: stop_words.with_folding(options.fold_alef_hamza),
            options,
        }
    }

    pub fn bundled() -> Self {
        Self::new(StopWordList::bundled(), CleanOptions::default())
    }

    pub fn options(&self) -> CleanOptions {
        self.options
    }

    pub fn stop_words(&self) -> &StopWordList {
        &self.stop_words
    }

    /// Splits on anything that is not a letter, diacritic or tatweel, then
    /// drops stop-words and words containing Latin letters. Positions count
    /// surviving tokens only.
    pub fn clean(&self, raw: &str) -> Vec<Token> {
        let mut out = Vec::new();
        let mut piece = String::new();
        let flush = |piece: &mut String, out: &mut Vec<Token>| {
            if piece.is_empty() {
                return;
            }
            let word = normalize_surface(piece, self.options.fold_alef_hamza);
            piece.clear();
            if word.is_empty() || !self.keeps(&word) || self.stop_words.contains(&word) {
                return;
            }
            let position = out.len();
            out.push(Token {
                surface: word,
                position,
            });
        };
        for c in raw.chars() {
            if c.is_alphabetic() || is_diacritic(c) || c == TATWEEL {
                piece.push(c);
            } else {
                flush(&mut piece, &mut out);
            }
        }
        flush(&mut piece, &mut out);
        out
    }

    fn keeps(&self, word: &str) -> bool {
        if self.options.keep_latin {
            return word.chars().all(char::is_alphabetic);
        }
        word.chars().all(is_arabic_letter) && !word.chars().any(is_latin_letter)
    }

    pub fn to_sequence(&self, snippet: &Snippet) -> TokenSequence {
        let title = self.clean(&snippet.title);
        let body = self.clean(&snippet.body);
        TokenSequence::from_segments(
            snippet.id,
            [title, body]
                .into_iter()
                .map(|seg| seg.into_iter().map(|t| t.surface).collect()),
        )
    }
}

/// Cleans `raw` with default options.
pub fn clean_text(raw: &str, stop_words: &StopWordList) -> Vec<Token> {
    TextCleaner::new(stop_words.clone(), CleanOptions::default()).clean(raw)
}

/// The cleaned token stream of one snippet: title tokens, then body tokens.
///
/// `breaks` records token indices that start a new segment; no phrase may
/// span a break. The per-document terminator is implicit (see
/// [`crate::suffix_tree`]): it is generated from `doc_id` and never equals a
/// word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSequence {
    pub doc_id: u32,
    pub tokens: Vec<Token>,
    pub breaks: Vec<usize>,
}

impl TokenSequence {
    /// Concatenates non-empty segments, recording a break between consecutive ones.
    pub fn from_segments<I, S>(doc_id: u32, segments: I) -> Self
    where
        I: IntoIterator<Item = Vec<S>>,
        S: Into<String>,
    {
        let mut tokens = Vec::new();
        let mut breaks = Vec::new();
        for seg in segments {
            if seg.is_empty() {
                continue;
            }
            if !tokens.is_empty() {
                breaks.push(tokens.len());
            }
            for w in seg {
                let position = tokens.len();
                tokens.push(Token {
                    surface: w.into(),
                    position,
                });
            }
        }
        Self {
            doc_id,
            tokens,
            breaks,
        }
    }

    /// Single-segment sequence from whitespace-separated words.
    pub fn from_text(doc_id: u32, text: &str) -> Self {
        Self::from_segments(doc_id, [text.split_whitespace().collect::<Vec<_>>()])
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.surface.as_str())
    }

    /// Token slices between breaks.
    pub fn segments(&self) -> Vec<&[Token]> {
        let mut bounds = vec![0];
        bounds.extend(self.breaks.iter().copied());
        bounds.push(self.tokens.len());
        bounds
            .windows(2)
            .map(|w| &self.tokens[w[0]..w[1]])
            .filter(|s| !s.is_empty())
            .collect()
    }

    /// Whether `phrase` occurs as a contiguous run inside one segment.
    pub fn contains_phrase<S: AsRef<str>>(&self, phrase: &[S]) -> bool {
        if phrase.is_empty() {
            return true;
        }
        self.segments().iter().any(|seg| {
            seg.windows(phrase.len())
                .any(|w| w.iter().zip(phrase).all(|(t, p)| t.surface == p.as_ref()))
        })
    }

    /// Replaces every token's surface with `f(surface)`, keeping positions and breaks.
    pub fn map_words(&self, mut f: impl FnMut(&str) -> String) -> Self {
        Self {
            doc_id: self.doc_id,
            tokens: self
                .tokens
                .iter()
                .map(|t| Token {
                    surface: f(&t.surface),
                    position: t.position,
                })
                .collect(),
            breaks: self.breaks.clone(),
        }
    }
}

/// Title-then-body sequence for one snippet.
pub fn snippet_to_sequence(snippet: &Snippet, stop_words: &StopWordList) -> TokenSequence {
    TextCleaner::new(stop_words.clone(), CleanOptions::default()).to_sequence(snippet)
}
