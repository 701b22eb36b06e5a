//! Arabic text handling: normalization, tokenization and root extraction.

pub mod chars;
mod clean;
mod root;

pub use clean::{
    clean_text, snippet_to_sequence, CleanOptions, StopWordList, TextCleaner, Token, TokenSequence,
};
pub use root::{extract_root, same_root_label, RootExtractor, RootLexicon, RootMethod, RootResult};
