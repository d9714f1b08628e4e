mod common;

use std::collections::HashMap;

use lra::corpus::PhraseQuery;
use lra::matrix::build_matrix;
use lra::patterns::{harvest_phrases, mine_top_patterns, Direction};
use lra::{run_pipeline, Corpus};

#[test]
fn toy_corpus_token_count_is_frozen() {
    let corpus = common::toy_corpus();
    assert_eq!(corpus.num_documents(), 5);
    assert_eq!(corpus.num_tokens(), 98_007);
}

#[test]
fn thesaurus_has_one_entry_per_line() {
    let text = std::fs::read_to_string(common::toy_dir().join("thesaurus.tsv")).unwrap();
    let lines = text.lines().filter(|l| !l.trim().is_empty()).count();
    assert_eq!(common::toy_thesaurus().len(), lines);
    assert_eq!(lines, 95);
}

#[test]
fn phrase_queries_agree_with_a_full_scan() {
    let corpus = common::toy_corpus();
    let naive = common::NaiveCorpus::new(&corpus);
    let queries = [
        ("dog", "bark"),
        ("bark", "dog"),
        ("cat", "meow"),
        ("duck", "quack"),
        ("weaver", "wool"),
        ("wool", "weaver"),
        ("larva", "beetle"),
        ("envelope", "letter"),
        ("brick", "wall"),
        ("broom", "sweep"),
        ("rain", "flood"),
        ("monk", "monastery"),
        ("smith", "iron"),
        ("iron", "smith"),
        ("carpenter", "wood"),
        ("the", "of"),
        ("of", "the"),
        ("barks", "dogs"),
        ("owl", "hoot"),
        ("flooding", "rains"),
    ];
    let mut total = 0;
    for (left, right) in queries {
        for (min_inter, max_inter) in [(1, 3), (0, 2), (2, 2)] {
            let got: Vec<_> = corpus
                .find_phrases(&PhraseQuery {
                    left,
                    right,
                    min_inter,
                    max_inter,
                })
                .into_iter()
                .map(|m| (m.doc_id, m.start_pos, m.intervening))
                .collect();
            let want = naive.windows(left, right, min_inter, max_inter);
            assert_eq!(got, want, "{left} … {right} ({min_inter}..={max_inter})");
            total += got.len();
        }
    }
    assert!(total > 100, "queries should exercise real matches, got {total}");
}

#[test]
fn matrix_cells_equal_a_recount_of_raw_phrases() {
    let corpus = common::toy_corpus();
    let thesaurus = common::toy_thesaurus();
    let config = common::toy_config();
    let pairs = common::question_pairs(&common::toy_questions());
    let out = run_pipeline(&config, &corpus, &thesaurus, &pairs).unwrap();
    let phrases = harvest_phrases(&out.versions, &corpus, config.min_inter, config.max_inter);
    let patterns = mine_top_patterns(&phrases, config.max_inter, config.num_patterns).unwrap();
    let matrix = build_matrix(&out.versions, &phrases, &patterns).unwrap();
    assert_eq!(matrix.cells, out.counts.cells);

    let naive = common::NaiveCorpus::new(&corpus);
    for row in 0..matrix.num_rows() {
        let (a, b) = matrix.rows.pair(row);
        let mut recount: HashMap<usize, f64> = HashMap::new();
        for (left, right, dir) in [(a, b, Direction::Forward), (b, a, Direction::Reverse)] {
            for (_, _, mid) in naive.windows(left, right, config.min_inter, config.max_inter) {
                for (j, pattern) in patterns.patterns.iter().enumerate() {
                    let slots: Vec<String> = pattern.to_string().split(' ').map(String::from).collect();
                    if common::slot_match(&slots, &mid) {
                        *recount.entry(matrix.columns.column(j, dir)).or_insert(0.0) += 1.0;
                    }
                }
            }
        }
        let stored: HashMap<usize, f64> = matrix.cells.row(row).collect();
        assert_eq!(stored, recount, "row {a}:{b}");
    }
}

#[test]
fn toy_index_roundtrips_through_bytes() {
    let corpus = common::toy_corpus();
    let again = Corpus::from_bytes(&corpus.to_bytes()).unwrap();
    assert_eq!(again, corpus);
}
