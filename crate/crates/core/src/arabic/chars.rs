//! Character classes and normalization for Arabic script.

pub const TATWEEL: char = '\u{0640}';

/// Harakat, Quranic annotation marks and the superscript alef.
pub fn is_diacritic(c: char) -> bool {
    matches!(c,
        '\u{0610}'..='\u{061A}'
        | '\u{064B}'..='\u{065F}'
        | '\u{0670}'
        | '\u{06D6}'..='\u{06DC}'
        | '\u{06DF}'..='\u{06E8}'
        | '\u{06EA}'..='\u{06ED}')
}

pub fn is_arabic_letter(c: char) -> bool {
    matches!(c,
        '\u{0620}'..='\u{063F}'
        | '\u{0641}'..='\u{064A}'
        | '\u{066E}'..='\u{066F}'
        | '\u{0671}'..='\u{06D3}'
        | '\u{06D5}'
        | '\u{06EE}'..='\u{06EF}'
        | '\u{06FA}'..='\u{06FC}'
        | '\u{06FF}')
}

pub fn is_latin_letter(c: char) -> bool {
    c.is_ascii_alphabetic()
        || (c.is_alphabetic()
            && matches!(c, '\u{00C0}'..='\u{024F}' | '\u{1E00}'..='\u{1EFF}' | '\u{FB00}'..='\u{FB06}'))
}

/// Removes diacritics and tatweel, leaving every other character in place.
pub fn strip_diacritics(s: &str) -> String {
    s.chars()
        .filter(|&c| c != TATWEEL && !is_diacritic(c))
        .collect()
}

/// Folds the hamza/madda alef variants (أ إ آ) onto bare alef.
pub fn fold_alef_hamza(c: char) -> char {
    match c {
        'أ' | 'إ' | 'آ' => 'ا',
        other => other,
    }
}

/// Folding used for root lookup: every hamza carrier and wasla alef becomes
/// bare alef, alef maqsura becomes ya.
pub fn fold_for_roots(c: char) -> char {
    match c {
        'أ' | 'إ' | 'آ' | 'ٱ' | 'ء' | 'ؤ' | 'ئ' => 'ا',
        'ى' => 'ي',
        other => other,
    }
}

pub fn contains_arabic(s: &str) -> bool {
    s.chars().any(is_arabic_letter)
}
