//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Tolerances are pinned below.

mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use stcb_core::arabic::{extract_root, TokenSequence};
use stcb_core::pipeline::{read_snippet_file, Pipeline, PipelineConfig, Scheme};
use stcb_core::stc::{
    extract_base_clusters, merge_clusters, select_top_k, BaseCluster, SimilarityConfig,
};
use stcb_core::suffix_tree::SuffixTree;

const WORKED_EXAMPLE_BUDGET: Duration = Duration::from_secs(1);
const PROPERTY_BUDGET: Duration = Duration::from_secs(30);
const RANDOM_CORPORA: u32 = 200;
const MAX_DOCS: usize = 8;
const MAX_TOKENS: usize = 10;
const ALPHA: f64 = 0.6;
const LINEAR_MAX_RATIO: f64 = 2.5;
const LINEAR_RUNS: usize = 5;
const LINEAR_SMALL_TOKENS: usize = 1_000;
const ROOT_MIN_AGREEMENT: usize = 45;
const ROOT_SAMPLE: usize = 1_000;
const ISLAM_STEM_FIRST_CLUSTERS: usize = 15;
const ISLAM_NEW_CLUSTERS: usize = 4;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn pipeline(cache: &tempfile::TempDir) -> Pipeline {
    Pipeline::new(PipelineConfig {
        cache_dir: cache.path().to_path_buf(),
        keep_latin: true,
        ..PipelineConfig::default()
    })
    .expect("default config is valid")
}

fn tree_of(docs: &[(u32, &str)]) -> SuffixTree {
    let seqs: Vec<_> = docs
        .iter()
        .map(|(id, s)| TokenSequence::from_text(*id, s))
        .collect();
    SuffixTree::build(&seqs).expect("unique ids")
}

fn listing(t: &SuffixTree) -> BTreeSet<(Vec<String>, Vec<u32>)> {
    t.internal_nodes()
        .into_iter()
        .map(|n| {
            let phrase = t.phrase(n).into_iter().map(str::to_string).collect();
            (phrase, t.doc_set(n).to_vec())
        })
        .collect()
}

fn expected(rows: &[(&str, &[u32])]) -> BTreeSet<(Vec<String>, Vec<u32>)> {
    rows.iter()
        .map(|(p, d)| (common::words(p), d.to_vec()))
        .collect()
}

fn worked_example() -> Outcome {
    let start = Instant::now();
    let english = listing(&tree_of(&common::cats_corpus()));
    let arabic = listing(&tree_of(&common::arabic_corpus()));
    let elapsed = start.elapsed();

    let want_en = expected(&[
        ("cat ate", &[1, 3]),
        ("ate", &[1, 2, 3]),
        ("cheese", &[1, 2]),
        ("ate cheese", &[1, 2]),
        ("mouse", &[2, 3]),
        ("too", &[2, 3]),
    ]);
    let want_ar = expected(&[
        ("القط ياكل", &[1, 3]),
        ("ياكل", &[1, 2, 3]),
        ("ياكل الجبن", &[1, 2]),
        ("الجبن", &[1, 2]),
        ("الفار", &[2, 3]),
        ("ايضا", &[2, 3]),
    ]);
    if english != want_en {
        return Err(format!("English nodes differ: {english:?}"));
    }
    if arabic != want_ar {
        return Err(format!("Arabic nodes differ: {arabic:?}"));
    }
    if elapsed >= WORKED_EXAMPLE_BUDGET {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("6 + 6 nodes exact, {elapsed:?}"))
}

fn scoring() -> Outcome {
    let tree = tree_of(&common::cats_corpus());
    for weight in [0.0, 0.5] {
        let cfg = SimilarityConfig {
            single_word_weight: weight,
            ..SimilarityConfig::default()
        };
        // |B| * F(P), worked by hand.
        let want: BTreeSet<(String, u64)> = [
            ("cat ate", 2.0 * 2.0),
            ("ate cheese", 2.0 * 2.0),
            ("ate", 3.0 * weight),
            ("cheese", 2.0 * weight),
            ("mouse", 2.0 * weight),
            ("too", 2.0 * weight),
        ]
        .into_iter()
        .map(|(p, s): (&str, f64)| (p.to_string(), s.to_bits()))
        .collect();
        let got: BTreeSet<(String, u64)> = extract_base_clusters(&tree, &cfg)
            .into_iter()
            .map(|c| (c.label(), c.score.to_bits()))
            .collect();
        if got != want {
            return Err(format!("weight {weight}: {got:?}"));
        }
    }
    Ok("6 base clusters exact at weights 0 and 0.5".into())
}

/// Members of each oracle component, as a set of sorted doc lists.
fn oracle_members(base: &[BaseCluster]) -> BTreeSet<Vec<u32>> {
    let sets: Vec<_> = base.iter().map(|c| c.docs.clone()).collect();
    common::closure_components(&sets, ALPHA)
        .into_iter()
        .map(|comp| {
            let m: BTreeSet<u32> = comp
                .iter()
                .flat_map(|&i| base[i].docs.iter().copied())
                .collect();
            m.into_iter().collect()
        })
        .collect()
}

fn merge_and_properties() -> Outcome {
    let start = Instant::now();
    let cfg = SimilarityConfig {
        alpha_sim: ALPHA,
        ..SimilarityConfig::default()
    };

    let tree = tree_of(&common::cats_corpus());
    let base = select_top_k(&extract_base_clusters(&tree, &cfg), &cfg);
    let finals = merge_clusters(&base, &cfg);
    let got: BTreeSet<Vec<u32>> = finals.iter().map(|f| f.members.clone()).collect();
    let want: BTreeSet<Vec<u32>> = [vec![1, 2, 3]].into();
    if got != want || oracle_members(&base) != want {
        return Err(format!("worked example merged into {got:?}"));
    }

    let word = prop::sample::select(vec!["a", "b", "c", "d"]).prop_map(str::to_string);
    let doc = prop::collection::vec(word, 0..=MAX_TOKENS);
    let corpus = prop::collection::vec(doc, 1..=MAX_DOCS);
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases: RANDOM_CORPORA,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let outcome = runner.run(&corpus, |docs| {
        let docs: Vec<(u32, Vec<Vec<String>>)> = docs
            .into_iter()
            .enumerate()
            .map(|(i, d)| (i as u32, vec![d]))
            .collect();
        let seqs: Vec<_> = docs
            .iter()
            .map(|(id, segs)| TokenSequence::from_segments(*id, segs.clone()))
            .collect();
        let tree = SuffixTree::build(&seqs).expect("unique ids");
        prop_assert_eq!(listing(&tree), common::branching_phrases(&docs));

        let base = select_top_k(&extract_base_clusters(&tree, &cfg), &cfg);
        let got: BTreeSet<Vec<u32>> = merge_clusters(&base, &cfg)
            .into_iter()
            .map(|f| f.members)
            .collect();
        prop_assert_eq!(got, oracle_members(&base));
        Ok(())
    });
    let elapsed = start.elapsed();
    if let Err(e) = outcome {
        return Err(format!("random corpus: {e}"));
    }
    if elapsed >= PROPERTY_BUDGET {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "one component {{1,2,3}}; {RANDOM_CORPORA} random corpora agree with oracles, {elapsed:?}"
    ))
}

fn islam_contrast() -> Outcome {
    let cache = tempfile::tempdir().map_err(|e| e.to_string())?;
    let snippets = read_snippet_file(&fixture("islam.xml")).map_err(|e| e.to_string())?;
    let report = pipeline(&cache).compare("الإسلام", snippets);
    let (a, b) = (&report.stem_first, &report.new_scheme);
    let summary = format!(
        "stem-first {} clusters, {:.0}% surface; new {} clusters, {:.0}% surface",
        a.cluster_count,
        a.surface_label_rate * 100.0,
        b.cluster_count,
        b.surface_label_rate * 100.0
    );
    let ok = a.cluster_count > b.cluster_count
        && b.surface_label_rate == 1.0
        && a.surface_label_rate < 0.5
        && a.cluster_count == ISLAM_STEM_FIRST_CLUSTERS
        && b.cluster_count == ISLAM_NEW_CLUSTERS;
    if ok {
        Ok(summary)
    } else {
        Err(summary)
    }
}

/// Synthetic corpus of `tokens` words over a fixed vocabulary, split into
/// ten-word documents. A small LCG keeps it reproducible.
fn synthetic(tokens: usize) -> Vec<TokenSequence> {
    const VOCAB: usize = 50;
    let mut state: u64 = 0x2545_f491_4f6c_dd1d;
    let mut next = || {
        state = state
            .wrapping_mul(6_364_136_223_846_793_005)
            .wrapping_add(1_442_695_040_888_963_407);
        (state >> 33) as usize % VOCAB
    };
    let words: Vec<String> = (0..tokens).map(|_| format!("w{}", next())).collect();
    words
        .chunks(10)
        .enumerate()
        .map(|(i, c)| TokenSequence::from_segments(i as u32, [c.to_vec()]))
        .collect()
}

fn median_build_time(seqs: &[TokenSequence], repeats: usize) -> Duration {
    let mut runs: Vec<Duration> = (0..LINEAR_RUNS)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..repeats {
                std::hint::black_box(SuffixTree::build(std::hint::black_box(seqs)).unwrap());
            }
            start.elapsed()
        })
        .collect();
    runs.sort();
    runs[LINEAR_RUNS / 2]
}

fn linear_guard() -> Outcome {
    // Each timed run repeats the build so it lasts well above timer noise.
    const REPEATS: usize = 20;
    let small = synthetic(LINEAR_SMALL_TOKENS);
    let large = synthetic(2 * LINEAR_SMALL_TOKENS);
    median_build_time(&small, REPEATS);
    let t1 = median_build_time(&small, REPEATS);
    let t2 = median_build_time(&large, REPEATS);
    let ratio = t2.as_secs_f64() / t1.as_secs_f64();
    let summary = format!("1k {t1:?}, 2k {t2:?}, ratio {ratio:.2}");
    if ratio <= LINEAR_MAX_RATIO {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn determinism() -> Outcome {
    let mut checked = 0;
    for name in ["fig7.xml", "cats.xml", "islam.xml", "cars.xml"] {
        for scheme in [Scheme::New, Scheme::StemFirst] {
            let run = || -> Result<String, String> {
                let cache = tempfile::tempdir().map_err(|e| e.to_string())?;
                let result = pipeline(&cache)
                    .with_scheme(scheme)
                    .run_file(&fixture(name))
                    .map_err(|e| e.to_string())?;
                Ok(result.canonical_json())
            };
            if run()? != run()? {
                return Err(format!("{name} ({scheme}) differs between runs"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} fixture/scheme pairs identical"))
}

fn random_words(count: usize) -> Vec<String> {
    let letters: Vec<char> = "ءآأؤإئابةتثجحخدذرزسشصضطظعغفقكلمنهوىي".chars().collect();
    let word = prop::collection::vec(prop::sample::select(letters), 1..9)
        .prop_map(|cs| cs.into_iter().collect::<String>());
    let mut runner = TestRunner::new_with_rng(
        Config::default(),
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    (0..count)
        .map(|_| word.new_tree(&mut runner).expect("strategy").current())
        .collect()
}

fn roots() -> Outcome {
    let golden: Vec<(&str, &str)> = include_str!("data/root_golden.tsv")
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .filter_map(|l| l.split_once('\t'))
        .map(|(w, r)| (w.trim(), r.trim()))
        .collect();
    let agree = golden
        .iter()
        .filter(|(w, r)| extract_root(w).root == *r)
        .count();

    let sample = random_words(ROOT_SAMPLE);
    let unstable: Vec<&String> = sample
        .iter()
        .filter(|w| {
            let once = extract_root(w).root;
            extract_root(&once).root != once
        })
        .collect();

    let summary = format!(
        "{agree}/{} golden roots, {}/{} idempotent",
        golden.len(),
        sample.len() - unstable.len(),
        sample.len()
    );
    if golden.len() == 50 && agree >= ROOT_MIN_AGREEMENT && unstable.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; unstable: {unstable:?}"))
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("worked-example-nodes", worked_example),
        ("scoring", scoring),
        ("merge-and-properties", merge_and_properties),
        ("new-scheme-contrast", islam_contrast),
        ("linear-time-guard", linear_guard),
        ("end-to-end-determinism", determinism),
        ("root-extraction", roots),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
