//! Reference implementations used as oracles. Deliberately naive.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

/// Next symbol after an occurrence: a word, or a sentinel that is unique per position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Next {
    Word(String),
    End(usize),
}

/// (phrase, sorted doc ids) for every phrase that is followed by at least two
/// distinct symbols somewhere in the corpus, i.e. every branching point of a
/// generalized suffix tree. `docs` holds (id, segments).
pub fn branching_phrases(docs: &[(u32, Vec<Vec<String>>)]) -> BTreeSet<(Vec<String>, Vec<u32>)> {
    let mut next: BTreeMap<Vec<String>, BTreeSet<Next>> = BTreeMap::new();
    let mut owners: BTreeMap<Vec<String>, BTreeSet<u32>> = BTreeMap::new();
    let mut unique = 0usize;
    for (id, segments) in docs {
        for seg in segments.iter().filter(|s| !s.is_empty()) {
            for i in 0..seg.len() {
                for j in i + 1..=seg.len() {
                    let phrase = seg[i..j].to_vec();
                    let follower = match seg.get(j) {
                        Some(w) => Next::Word(w.clone()),
                        None => {
                            unique += 1;
                            Next::End(unique)
                        }
                    };
                    next.entry(phrase.clone()).or_default().insert(follower);
                    owners.entry(phrase).or_default().insert(*id);
                }
            }
        }
    }
    next.into_iter()
        .filter(|(_, followers)| followers.len() >= 2)
        .map(|(p, _)| {
            let docs = owners[&p].iter().copied().collect();
            (p, docs)
        })
        .collect()
}

/// Connected components of the overlap graph by boolean transitive closure.
/// Returns, per component, the sorted member indices; components sorted by
/// their smallest index.
pub fn closure_components(doc_sets: &[Vec<u32>], alpha: f64) -> Vec<Vec<usize>> {
    let n = doc_sets.len();
    let mut reach = vec![vec![false; n]; n];
    for i in 0..n {
        reach[i][i] = true;
        for j in 0..n {
            let a: BTreeSet<_> = doc_sets[i].iter().collect();
            let b: BTreeSet<_> = doc_sets[j].iter().collect();
            let inter = a.intersection(&b).count() as f64;
            if !a.is_empty()
                && !b.is_empty()
                && inter / a.len() as f64 >= alpha
                && inter / b.len() as f64 >= alpha
            {
                reach[i][j] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let comp: Vec<usize> = (0..n).filter(|&j| reach[i][j]).collect();
        for &j in &comp {
            seen[j] = true;
        }
        out.push(comp);
    }
    out
}

pub fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

/// The Arabic three-document corpus of the cheese-eating example, as cleaned tokens.
pub fn arabic_corpus() -> Vec<(u32, &'static str)> {
    vec![
        (1, "القط ياكل الجبن"),
        (2, "الفار ياكل الجبن ايضا"),
        (3, "القط ياكل الفار ايضا"),
    ]
}

pub fn cats_corpus() -> Vec<(u32, &'static str)> {
    vec![
        (1, "cat ate cheese"),
        (2, "mouse ate cheese too"),
        (3, "cat ate mouse too"),
    ]
}
