use std::collections::{BTreeMap, HashSet};

use super::Snippet;

/// Output of [`dedup_snippets`]: the surviving snippets renumbered `0..n`,
/// plus the mapping from each surviving snippet's original id to its new id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deduplicated {
    pub snippets: Vec<Snippet>,
    pub id_map: BTreeMap<u32, u32>,
}

/// Drops every snippet whose url, or whose (title, body) pair, repeats an
/// earlier snippet. Survivors keep their relative order and get dense ids.
pub fn dedup_snippets(snippets: Vec<Snippet>) -> Deduplicated {
    let mut seen_urls: HashSet<String> = HashSet::new();
    let mut seen_content: HashSet<(String, String)> = HashSet::new();
    let mut kept = Vec::with_capacity(snippets.len());
    let mut id_map = BTreeMap::new();

    for mut s in snippets {
        let url_key = s.url.trim().to_string();
        let content_key = (s.title.trim().to_string(), s.body.trim().to_string());
        let url_dup = !url_key.is_empty() && !seen_urls.insert(url_key);
        let content_dup = !seen_content.insert(content_key);
        // Keys of dropped snippets stay recorded: "earlier" means earlier in the input.
        if url_dup || content_dup {
            continue;
        }

        let new_id = kept.len() as u32;
        id_map.entry(s.id).or_insert(new_id);
        s.id = new_id;
        kept.push(s);
    }

    Deduplicated {
        snippets: kept,
        id_map,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn snip(id: u32, url: &str, title: &str, body: &str) -> Snippet {
        Snippet::new(id, url, title, body)
    }

    #[test]
    fn exact_url_duplicate_dropped() {
        let input = vec![
            snip(0, "u1", "a", "x"),
            snip(1, "u2", "b", "y"),
            snip(2, "u1", "c", "z"),
        ];
        let out = dedup_snippets(input);
        let titles: Vec<_> = out.snippets.iter().map(|s| s.title.as_str()).collect();
        assert_eq!(titles, ["a", "b"]);
        assert_eq!(out.id_map.len(), 2);
    }

    #[test]
    fn no_duplicates_is_identity() {
        let input = vec![snip(0, "u1", "a", "x"), snip(1, "u2", "b", "y")];
        let out = dedup_snippets(input.clone());
        assert_eq!(out.snippets, input);
        assert!(out.id_map.iter().all(|(k, v)| k == v));
    }

    /// Pairwise O(n^2) reference: a snippet survives iff no earlier snippet
    /// in the *input* matches it on url or on (title, body).
    fn brute_force(input: &[Snippet]) -> Vec<usize> {
        (0..input.len())
            .filter(|&i| {
                !(0..i).any(|j| {
                    let a = &input[i];
                    let b = &input[j];
                    (!a.url.trim().is_empty() && a.url.trim() == b.url.trim())
                        || (a.title.trim() == b.title.trim() && a.body.trim() == b.body.trim())
                })
            })
            .collect()
    }

    #[test]
    fn same_content_different_url_dropped() {
        let input = vec![
            snip(10, "u1", "T", "B"),
            snip(11, "u9", "T", "B"),
            snip(12, "u2", "T2", "B2"),
        ];
        let out = dedup_snippets(input.clone());
        let expected = brute_force(&input);
        assert_eq!(expected, vec![0, 2]);
        assert_eq!(out.snippets.len(), 2);
        assert_eq!(out.snippets[0].url, "u1");
        assert_eq!(out.snippets[1].url, "u2");
        assert_eq!(out.id_map.get(&10), Some(&0));
        assert_eq!(out.id_map.get(&12), Some(&1));
        assert_eq!(out.id_map.get(&11), None);
    }

    fn arb_snippets() -> impl Strategy<Value = Vec<Snippet>> {
        prop::collection::vec(("[ab]{0,1}", "[xy]", "[pq]"), 0..12).prop_map(|v| {
            v.into_iter()
                .enumerate()
                .map(|(i, (u, t, b))| snip(i as u32, &u, &t, &b))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn dedup_matches_pairwise_reference(input in arb_snippets()) {
            let out = dedup_snippets(input.clone());
            let expected = brute_force(&input);
            prop_assert_eq!(out.snippets.len(), expected.len());
            for (new_id, &old_idx) in expected.iter().enumerate() {
                let s = &out.snippets[new_id];
                prop_assert_eq!(s.id as usize, new_id);
                prop_assert_eq!(&s.url, &input[old_idx].url);
                prop_assert_eq!(&s.title, &input[old_idx].title);
            }
        }

        #[test]
        fn dedup_is_idempotent(input in arb_snippets()) {
            let once = dedup_snippets(input).snippets;
            let twice = dedup_snippets(once.clone()).snippets;
            prop_assert_eq!(once, twice);
        }
    }
}
