//! Khoja-style root extraction.
//!
//! A word is normalized, stripped of definite-article, conjunction and
//! pronoun affixes, and the remaining stem is matched against morphological
//! templates. A template match only counts when the recovered radicals form
//! a root listed in the lexicon. Words that never validate fall back to
//! their affix-stripped stem.
//!
//! The whole procedure is iterated until the output stops changing, so the
//! result is always a fixed point: extracting the root of a root returns it
//! unchanged.

use std::collections::HashSet;
use std::ops::Range;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::chars::{contains_arabic, fold_for_roots, is_arabic_letter, strip_diacritics};

const BUNDLED_ROOTS: &str = include_str!("../../data/roots_ar.txt");

/// Definite article, optionally fused with a preceding conjunction or preposition.
const ARTICLES: &[&str] = &[
    "وبال", "وكال", "فبال", "وال", "بال", "كال", "فال", "ولل", "فلل", "لل", "ال",
];

/// Proclitics other than the article, longest first.
const PREFIXES: &[&str] = &[
    "وب", "ول", "وس", "وك", "فب", "فل", "فس", "و", "ف", "ب", "ك", "ل", "س",
];

/// Enclitic pronouns and inflectional endings, longest first.
const SUFFIXES: &[&str] = &[
    "تموها",
    "كما",
    "هما",
    "تما",
    "تان",
    "تين",
    "كم",
    "هم",
    "هن",
    "كن",
    "ها",
    "نا",
    "ان",
    "ات",
    "ون",
    "ين",
    "ية",
    "يه",
    "وا",
    "تم",
    "تن",
    "ني",
    "ة",
    "ه",
    "ي",
    "ك",
    "ت",
    "ا",
    "ن",
];

/// Templates over the radical slots ف ع ل (a second ل marks a fourth radical).
/// Every other letter must appear literally in the stem.
const PATTERNS: &[&str] = &[
    // four letters
    "فاعل",
    "فعال",
    "فعول",
    "فعيل",
    "مفعل",
    "افعل",
    "تفعل",
    "يفعل",
    "نفعل",
    // five letters
    "مفعول",
    "مفاعل",
    "مفعال",
    "مفعيل",
    "تفعيل",
    "تفاعل",
    "افتعل",
    "انفعل",
    "افعال",
    "فواعل",
    "فعايل",
    "فاعول",
    "فعلان",
    "مفتعل",
    "منفعل",
    "يفتعل",
    "تفتعل",
    "يتفعل",
    "تتفعل",
    "متفعل",
    "يفاعل",
    "فعالل",
    "تفعلل",
    "مفعلل",
    // six letters
    "استفعل",
    "مستفعل",
    "افتعال",
    "انفعال",
    "مفاعيل",
    "تفاعيل",
    "افعلال",
    "متفاعل",
    "يستفعل",
    "تستفعل",
    "نستفعل",
    "متفعلل",
    // seven letters
    "استفعال",
];

/// Shortest stem the affix-strip fallback will leave behind.
const MIN_FALLBACK_STEM: usize = 3;

/// How [`RootExtractor::extract`] arrived at its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootMethod {
    DictionaryPattern,
    AffixStripFallback,
    Unchanged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootResult {
    pub input: String,
    pub root: String,
    pub method: RootMethod,
}

/// Set of known roots, stored in root-folded form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootLexicon {
    roots: HashSet<Vec<char>>,
}

impl RootLexicon {
    /// One root per line; blank lines and `#` comments are ignored. Entries
    /// that are not 3 or 4 letters long after folding are skipped.
    pub fn from_text(text: &str) -> Self {
        let roots = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(fold_word)
            .filter(|r| (3..=4).contains(&r.len()))
            .collect();
        Self { roots }
    }

    pub fn bundled() -> Self {
        Self::from_text(BUNDLED_ROOTS)
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        Ok(Self::from_text(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, root: &str) -> bool {
        self.roots.contains(&fold_word(root))
    }

    fn contains_chars(&self, root: &[char]) -> bool {
        self.roots.contains(root)
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

fn fold_word(word: &str) -> Vec<char> {
    strip_diacritics(word).chars().map(fold_for_roots).collect()
}

fn chars_of(s: &str) -> Vec<char> {
    s.chars().collect()
}

fn starts_with(word: &[char], affix: &str) -> bool {
    let affix = chars_of(affix);
    word.len() >= affix.len() && word[..affix.len()] == affix[..]
}

fn ends_with(word: &[char], affix: &str) -> bool {
    let affix = chars_of(affix);
    word.len() >= affix.len() && word[word.len() - affix.len()..] == affix[..]
}

fn is_slot(c: char) -> bool {
    matches!(c, 'ف' | 'ع' | 'ل')
}

/// Radicals of `stem` under `pattern`, or `None` if the literal letters disagree.
fn apply_pattern(stem: &[char], pattern: &[char]) -> Option<Vec<char>> {
    if stem.len() != pattern.len() {
        return None;
    }
    let mut radicals = Vec::with_capacity(4);
    for (&s, &p) in stem.iter().zip(pattern) {
        if is_slot(p) {
            radicals.push(s);
        } else if s != p {
            return None;
        }
    }
    Some(radicals)
}

enum Step {
    Root(Vec<char>),
    Strip(Range<usize>),
}

#[derive(Debug, Clone)]
pub struct RootExtractor {
    lexicon: RootLexicon,
    patterns: Vec<Vec<char>>,
}

impl Default for RootExtractor {
    fn default() -> Self {
        Self::new(RootLexicon::bundled())
    }
}

impl RootExtractor {
    pub fn new(lexicon: RootLexicon) -> Self {
        Self {
            lexicon,
            patterns: PATTERNS.iter().map(|p| chars_of(p)).collect(),
        }
    }

    pub fn lexicon(&self) -> &RootLexicon {
        &self.lexicon
    }

    pub fn extract(&self, word: &str) -> RootResult {
        let stripped = strip_diacritics(word.trim());
        if stripped.is_empty()
            || !contains_arabic(&stripped)
            || !stripped.chars().all(is_arabic_letter)
        {
            return RootResult {
                input: word.to_string(),
                root: stripped,
                method: RootMethod::Unchanged,
            };
        }

        // Folded letters drive matching; the unfolded ones decide whether a
        // leading ال is an article (so ألعاب keeps its hamza-initial stem)
        // and are what the fallback returns, so the output is a fixed point.
        let mut raw: Vec<char> = stripped.chars().collect();
        let initial = raw.clone();
        let mut method = RootMethod::Unchanged;

        for _ in 0..16 {
            let folded: Vec<char> = raw.iter().map(|&c| fold_for_roots(c)).collect();
            match self.step(&folded, &raw) {
                Step::Root(root) => {
                    method = RootMethod::DictionaryPattern;
                    if root == raw {
                        break;
                    }
                    raw = root;
                }
                Step::Strip(range) => {
                    if range.len() == raw.len() {
                        break;
                    }
                    method = RootMethod::AffixStripFallback;
                    raw = raw[range].to_vec();
                }
            }
        }
        if raw == initial && method != RootMethod::DictionaryPattern {
            method = RootMethod::Unchanged;
        }

        RootResult {
            input: word.to_string(),
            root: raw.into_iter().collect(),
            method,
        }
    }

    /// Roots of each word, sorted: a multiset key for a phrase.
    pub fn root_signature<S: AsRef<str>>(&self, words: &[S]) -> Vec<String> {
        let mut roots: Vec<String> = words
            .iter()
            .map(|w| self.extract(w.as_ref()).root)
            .collect();
        roots.sort();
        roots
    }

    pub fn same_root_label<A: AsRef<str>, B: AsRef<str>>(&self, a: &[A], b: &[B]) -> bool {
        self.root_signature(a) == self.root_signature(b)
    }

    /// One round of extraction over the folded `word`: either a root
    /// validated against the lexicon, or the span left after affix stripping.
    fn step(&self, word: &[char], article_source: &[char]) -> Step {
        if word.len() < 2 {
            return Step::Strip(0..word.len());
        }
        if (3..=4).contains(&word.len()) && self.lexicon.contains_chars(word) {
            return Step::Root(word.to_vec());
        }

        let mut bases: Vec<Vec<char>> = Vec::with_capacity(2);
        if let Some(article) = ARTICLES
            .iter()
            .find(|a| starts_with(article_source, a) && word.len() >= a.chars().count() + 2)
        {
            bases.push(word[article.chars().count()..].to_vec());
        }
        bases.push(word.to_vec());

        for base in &bases {
            let suffixes = SUFFIXES
                .iter()
                .filter(|s| ends_with(base, s) && base.len() >= s.chars().count() + 2)
                .map(|s| s.chars().count())
                .chain(std::iter::once(0));
            for suffix_len in suffixes {
                let without_suffix = &base[..base.len() - suffix_len];
                let prefixes = std::iter::once(0).chain(
                    PREFIXES
                        .iter()
                        .filter(|p| {
                            starts_with(without_suffix, p)
                                && without_suffix.len() >= p.chars().count() + 2
                        })
                        .map(|p| p.chars().count()),
                );
                for prefix_len in prefixes {
                    let stem = &without_suffix[prefix_len..];
                    if let Some(root) = self.match_stem(stem, word.len()) {
                        return Step::Root(root);
                    }
                }
            }
        }

        Step::Strip(self.strip_affixes(word, article_source))
    }

    /// Validated root for an affix-free stem, trying templates and weak-letter
    /// repairs. Never returns anything longer than `max_len`.
    fn match_stem(&self, stem: &[char], max_len: usize) -> Option<Vec<char>> {
        match stem.len() {
            2 => self.expand_biliteral(stem, max_len),
            3 => self.validate_triliteral(stem),
            4 if self.lexicon.contains_chars(stem) => Some(stem.to_vec()),
            n => self
                .patterns
                .iter()
                .filter(|p| p.len() == n)
                .filter_map(|p| apply_pattern(stem, p))
                .find_map(|radicals| match radicals.len() {
                    3 => self.validate_triliteral(&radicals),
                    4 if self.lexicon.contains_chars(&radicals) => Some(radicals),
                    _ => None,
                }),
        }
    }

    /// Checks a three-letter candidate, substituting و/ي for a weak or
    /// lengthening letter in second or third position.
    fn validate_triliteral(&self, radicals: &[char]) -> Option<Vec<char>> {
        if self.lexicon.contains_chars(radicals) {
            return Some(radicals.to_vec());
        }
        for pos in [1, 2] {
            if matches!(radicals[pos], 'ا' | 'و' | 'ي') {
                for weak in ['و', 'ي'] {
                    if weak == radicals[pos] {
                        continue;
                    }
                    let mut candidate = radicals.to_vec();
                    candidate[pos] = weak;
                    if self.lexicon.contains_chars(&candidate) {
                        return Some(candidate);
                    }
                }
            }
        }
        None
    }

    /// Two surviving letters usually mean a doubled or weak root.
    fn expand_biliteral(&self, stem: &[char], max_len: usize) -> Option<Vec<char>> {
        if max_len < 3 {
            return None;
        }
        let (a, b) = (stem[0], stem[1]);
        [
            [a, b, b],
            [a, 'و', b],
            [a, 'ي', b],
            [a, b, 'ي'],
            [a, b, 'و'],
            ['و', a, b],
        ]
        .into_iter()
        .find(|c| self.lexicon.contains_chars(c))
        .map(|c| c.to_vec())
    }

    /// Fallback: one pass of article, suffix and prefix removal, each only
    /// when at least [`MIN_FALLBACK_STEM`] letters remain.
    fn strip_affixes(&self, word: &[char], article_source: &[char]) -> Range<usize> {
        let (mut start, mut end) = (0, word.len());
        let fits = |affix: &str, len: usize| len >= affix.chars().count() + MIN_FALLBACK_STEM;
        if let Some(a) = ARTICLES
            .iter()
            .find(|a| starts_with(article_source, a) && fits(a, end - start))
        {
            start += a.chars().count();
        }
        if let Some(s) = SUFFIXES
            .iter()
            .find(|s| ends_with(&word[start..end], s) && fits(s, end - start))
        {
            end -= s.chars().count();
        }
        if let Some(p) = PREFIXES
            .iter()
            .find(|p| starts_with(&word[start..end], p) && fits(p, end - start))
        {
            start += p.chars().count();
        }
        start..end
    }
}

fn shared() -> &'static RootExtractor {
    static EXTRACTOR: OnceLock<RootExtractor> = OnceLock::new();
    EXTRACTOR.get_or_init(RootExtractor::default)
}

/// Root of `word` using the bundled lexicon.
pub fn extract_root(word: &str) -> RootResult {
    shared().extract(word)
}

/// True iff the two phrases have the same multiset of roots (bundled lexicon).
pub fn same_root_label<A: AsRef<str>, B: AsRef<str>>(label_a: &[A], label_b: &[B]) -> bool {
    shared().same_root_label(label_a, label_b)
}
