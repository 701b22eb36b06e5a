mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;

use proptest::prelude::*;
use stcb_core::arabic::{RootExtractor, StopWordList, TextCleaner};
use stcb_core::consolidate::{consolidate, SignificanceConfig};
use stcb_core::pipeline::{
    label_occurs_in, read_snippet_file, ClusterResult, Pipeline, PipelineConfig, Scheme, Stage,
};
use stcb_core::snippet::Snippet;
use stcb_core::stc::FinalCluster;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn pipeline(cache: &tempfile::TempDir) -> Pipeline {
    Pipeline::new(PipelineConfig {
        corpus_dir: Some(fixture("corpus")),
        cache_dir: cache.path().to_path_buf(),
        keep_latin: true,
        ..PipelineConfig::default()
    })
    .unwrap()
}

fn run(name: &str) -> ClusterResult {
    let cache = tempfile::tempdir().unwrap();
    pipeline(&cache).run_file(&fixture(name)).unwrap()
}

const FIXTURES: [&str; 4] = ["fig7.xml", "cats.xml", "islam.xml", "cars.xml"];

#[test]
fn fig7_parses_as_two_snippets() {
    let snippets = read_snippet_file(&fixture("fig7.xml")).unwrap();
    assert_eq!(snippets.len(), 2);
    assert_eq!(
        snippets[0].title,
        "التعليم والتربية - ويكيبيديا، الموسوعة الحرة"
    );
    assert!(snippets[0].url.starts_with("http://ar.wikipedia.org/wiki/"));
    assert_eq!(snippets[1].url, "http://www.mohe.gov.sa/");
}

#[test]
fn fig7_tokens_match_golden() {
    let golden = include_str!("data/fig7_tokens.txt");
    let snippets = read_snippet_file(&fixture("fig7.xml")).unwrap();
    let cleaner = TextCleaner::new(StopWordList::bundled(), Default::default());
    let mut checked = 0;
    for line in golden.lines().filter(|l| !l.starts_with('#')) {
        let (head, tokens) = line.split_once(": ").unwrap();
        let (id, part) = head.split_once(' ').unwrap();
        let s = &snippets[id.parse::<usize>().unwrap()];
        let raw = if part == "title" { &s.title } else { &s.body };
        let got: Vec<String> = cleaner.clean(raw).into_iter().map(|t| t.surface).collect();
        assert_eq!(got, common::words(tokens), "snippet {id} {part}");
        checked += 1;
    }
    assert_eq!(checked, 4);
}

#[test]
fn cats_corpus_forms_one_cluster() {
    let result = run("cats.xml");
    assert_eq!(result.clusters.len(), 1);
    let c = &result.clusters[0];
    assert_eq!(c.display_label, "ate cheese");
    assert_eq!(c.members, vec![0, 1, 2]);
    assert!(result.unclustered.is_empty());
}

#[test]
fn empty_input_gives_empty_result() {
    let cache = tempfile::tempdir().unwrap();
    let result = pipeline(&cache).cluster("q", Vec::new());
    assert!(result.clusters.is_empty());
    assert!(result.snippets.is_empty());
    assert!(result.unclustered.is_empty());

    let blanks = vec![
        Snippet::new(0, "u", "", "  "),
        Snippet::new(1, "v", "$ # /", ""),
    ];
    let result = pipeline(&cache).cluster("q", blanks);
    assert!(result.clusters.is_empty());
}

#[test]
fn runs_are_deterministic() {
    for name in FIXTURES {
        for scheme in [Scheme::New, Scheme::StemFirst] {
            let cache = tempfile::tempdir().unwrap();
            let p = pipeline(&cache).with_scheme(scheme);
            let a = p.run_file(&fixture(name)).unwrap();
            let b = p.run_file(&fixture(name)).unwrap();
            assert_eq!(a.canonical_json(), b.canonical_json(), "{name} {scheme}");
        }
    }
}

#[test]
fn stages_run_in_order() {
    let new = run("fig7.xml");
    assert_eq!(
        new.stages(),
        [
            Stage::Parse,
            Stage::Dedup,
            Stage::Clean,
            Stage::BuildTree,
            Stage::BaseClusters,
            Stage::SelectTopK,
            Stage::Merge,
            Stage::Roots,
            Stage::Consolidate,
        ]
    );
    let cache = tempfile::tempdir().unwrap();
    let stem = pipeline(&cache)
        .with_scheme(Scheme::StemFirst)
        .run_file(&fixture("fig7.xml"))
        .unwrap();
    assert_eq!(
        stem.stages(),
        [
            Stage::Parse,
            Stage::Dedup,
            Stage::Clean,
            Stage::Stem,
            Stage::BuildTree,
            Stage::BaseClusters,
            Stage::SelectTopK,
            Stage::Merge,
            Stage::Consolidate,
        ]
    );
}

#[test]
fn every_snippet_is_clustered_or_listed() {
    for name in FIXTURES {
        let r = run(name);
        let mut seen: BTreeSet<u32> = r.unclustered.iter().copied().collect();
        for c in &r.clusters {
            assert!(c.members.len() >= 2);
            seen.extend(&c.members);
        }
        let all: BTreeSet<u32> = r.snippets.iter().map(|s| s.id).collect();
        assert_eq!(seen, all, "{name}");
    }
}

#[test]
fn display_labels_occur_in_member_snippets() {
    let cache = tempfile::tempdir().unwrap();
    let p = pipeline(&cache);
    let cleaner = &p.resources().cleaner;
    for name in FIXTURES {
        let r = p.run_file(&fixture(name)).unwrap();
        let seqs: Vec<_> = r.snippets.iter().map(|s| cleaner.to_sequence(s)).collect();
        for c in &r.clusters {
            assert!(
                label_occurs_in(
                    &c.display_label,
                    c.members.iter().map(|&m| &seqs[m as usize])
                ),
                "{name}: {:?}",
                c.display_label
            );
        }
    }
}

#[test]
fn islam_fixture_contrast() {
    let cache = tempfile::tempdir().unwrap();
    let snippets = read_snippet_file(&fixture("islam.xml")).unwrap();
    let report = pipeline(&cache).compare("الإسلام", snippets);
    assert_eq!(report.snippet_count, 19);
    assert_eq!(report.stem_first.cluster_count, 15);
    assert_eq!(report.new_scheme.cluster_count, 4);
    assert_eq!(report.new_scheme.surface_label_rate, 1.0);
    assert!(report.stem_first.surface_label_rate < 0.5);

    let labels: Vec<(&str, &[u32])> = report
        .new_scheme
        .clusters
        .iter()
        .map(|c| (c.display_label.as_str(), c.members.as_slice()))
        .collect();
    assert_eq!(
        labels,
        [
            ("الإسلامية", &[0, 2, 3, 4, 5, 6, 7, 8, 11, 12, 14][..]),
            ("مواقع", &[1, 3, 6, 12][..]),
            ("والعلوم", &[4, 7, 14][..]),
            ("المراجع", &[12, 13][..]),
        ]
    );
}

#[test]
fn cars_fixture_top_labels() {
    let r = run("cars.xml");
    let top: Vec<&str> = r
        .clusters
        .iter()
        .take(4)
        .map(|c| c.display_label.as_str())
        .collect();
    assert_eq!(
        top,
        [
            "اخبار السيارات",
            "العاب سيارات",
            "سباقات السيارات",
            "السيارات"
        ]
    );
    assert!(r.clusters.len() <= 15);
}

#[test]
fn query_runs_through_fixture_corpus_and_cache() {
    let cache = tempfile::tempdir().unwrap();
    let p = pipeline(&cache);
    let first = p.run_query("التعليم").unwrap();
    assert_eq!(first.snippets.len(), 2);
    assert_eq!(first.clusters[0].display_label, "التعليم");
    assert_eq!(first.stages()[0], Stage::Fetch);
    let second = p.run_query("  التعليم ").unwrap();
    assert_eq!(first.canonical_json(), second.canonical_json());

    let missing = p.run_query("غير موجود").unwrap();
    assert!(missing.snippets.is_empty());
    assert_eq!(p.run_query(" ").unwrap_err().code(), "empty-query");
}

#[test]
fn duplicate_snippets_are_dropped() {
    let cache = tempfile::tempdir().unwrap();
    let mut snippets = read_snippet_file(&fixture("fig7.xml")).unwrap();
    let mut copy = snippets[0].clone();
    copy.id = 7;
    snippets.push(copy);
    let r = pipeline(&cache).cluster("q", snippets);
    assert_eq!(r.snippets.len(), 2);
}

// Consolidation properties over small random label sets.

const VOCAB: [&str; 8] = [
    "التعليم",
    "تعليم",
    "المعلم",
    "السياحة",
    "سياحة",
    "السيارات",
    "سيارة",
    "الإسلامية",
];

fn final_cluster() -> impl Strategy<Value = FinalCluster> {
    (
        prop::collection::vec(prop::sample::select(&VOCAB[..]), 1..3),
        prop::collection::btree_set(0u32..12, 1..6),
        1u32..20,
    )
        .prop_map(|(label, members, score)| FinalCluster {
            labels: vec![label.into_iter().map(str::to_string).collect()],
            members: members.into_iter().collect(),
            score: score as f64 / 2.0,
        })
}

proptest! {
    #[test]
    fn consolidation_is_idempotent(finals in prop::collection::vec(final_cluster(), 0..10)) {
        let ex = RootExtractor::default();
        let cfg = SignificanceConfig { min_members: 1, max_clusters: 100 };
        let once = consolidate(&finals, &ex, &cfg);
        let again: Vec<FinalCluster> = once.iter().map(FinalCluster::from).collect();
        let twice = consolidate(&again, &ex, &cfg);
        let key = |v: &[stcb_core::consolidate::ConsolidatedCluster]| {
            v.iter().map(|c| (c.display_label.clone(), c.members.clone())).collect::<Vec<_>>()
        };
        prop_assert_eq!(key(&once), key(&twice));
    }

    #[test]
    fn consolidation_preserves_members(finals in prop::collection::vec(final_cluster(), 0..10)) {
        let ex = RootExtractor::default();
        let cfg = SignificanceConfig { min_members: 1, max_clusters: 100 };
        let out = consolidate(&finals, &ex, &cfg);
        prop_assert!(out.len() <= finals.len());
        let before: BTreeSet<u32> = finals.iter().flat_map(|f| f.members.clone()).collect();
        let after: BTreeSet<u32> = out.iter().flat_map(|c| c.members.clone()).collect();
        prop_assert_eq!(before, after);
        for f in &finals {
            let label = f.top_label().join(" ");
            let home = out.iter().find(|c| c.merged_from.contains(&label)).unwrap();
            prop_assert!(f.members.iter().all(|m| home.members.contains(m)));
            prop_assert_eq!(&home.root_signature, &ex.root_signature(f.top_label()));
        }
        // Distinct clusters never share a signature.
        let sigs: BTreeSet<_> = out.iter().map(|c| c.root_signature.clone()).collect();
        prop_assert_eq!(sigs.len(), out.len());
    }

    #[test]
    fn significance_filter_holds(finals in prop::collection::vec(final_cluster(), 0..12), min in 1usize..4, max in 1usize..6) {
        let ex = RootExtractor::default();
        let cfg = SignificanceConfig { min_members: min, max_clusters: max };
        let out = consolidate(&finals, &ex, &cfg);
        prop_assert!(out.len() <= max);
        prop_assert!(out.iter().all(|c| c.members.len() >= min));
        prop_assert!(out.windows(2).all(|w| w[0].score >= w[1].score));
    }
}
