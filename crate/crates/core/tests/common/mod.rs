#![allow(dead_code)]

use std::path::PathBuf;

use lra::evaluation::{load_questions, AnalogyQuestion};
use lra::{Corpus, LraConfig, Thesaurus, WordPair};

pub fn toy_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy")
}

pub fn toy_corpus() -> Corpus {
    Corpus::from_path(&toy_dir().join("corpus")).expect("toy corpus")
}

pub fn toy_thesaurus() -> Thesaurus {
    Thesaurus::load(&toy_dir().join("thesaurus.tsv")).expect("toy thesaurus")
}

pub fn toy_questions() -> Vec<AnalogyQuestion> {
    load_questions(&toy_dir().join("sat.txt")).expect("toy questions")
}

/// Every stem and choice pair, in file order.
pub fn question_pairs(questions: &[AnalogyQuestion]) -> Vec<WordPair> {
    questions
        .iter()
        .flat_map(|q| std::iter::once(q.stem.clone()).chain(q.choices.iter().cloned()))
        .collect()
}

/// Settings sized for the toy fixture.
pub fn toy_config() -> LraConfig {
    LraConfig {
        num_patterns: 400,
        k: 300,
        ..LraConfig::default()
    }
}

/// Every token of the corpus with its stem and sentence number, read
/// through the public accessors.
pub struct NaiveCorpus {
    docs: Vec<Vec<(String, String, u32)>>,
}

impl NaiveCorpus {
    pub fn new(corpus: &Corpus) -> NaiveCorpus {
        let docs = (0..corpus.num_documents())
            .map(|d| {
                corpus
                    .document_tokens(d)
                    .enumerate()
                    .map(|(p, t)| (t.to_string(), lra::corpus::stem(t), corpus.sentence_of(d, p)))
                    .collect()
            })
            .collect();
        NaiveCorpus { docs }
    }

    /// Windows `left … right` found by walking every token of every
    /// document.
    pub fn windows(&self, left: &str, right: &str, min_inter: usize, max_inter: usize) -> Vec<(usize, usize, Vec<String>)> {
        let (ls, rs) = (lra::corpus::stem(left), lra::corpus::stem(right));
        let mut out = Vec::new();
        for (d, tokens) in self.docs.iter().enumerate() {
            for start in 0..tokens.len() {
                if tokens[start].1 != ls {
                    continue;
                }
                for gap in min_inter..=max_inter {
                    let end = start + gap + 1;
                    if end >= tokens.len() || tokens[end].2 != tokens[start].2 {
                        break;
                    }
                    if tokens[end].1 == rs {
                        out.push((d, start, tokens[start + 1..end].iter().map(|t| t.0.clone()).collect()));
                    }
                }
            }
        }
        out
    }
}

/// Every way of replacing a subset of `words` by `*`, built by recursion.
pub fn wildcard_variants(words: &[String]) -> Vec<Vec<String>> {
    match words.split_first() {
        None => vec![vec![]],
        Some((first, rest)) => {
            let mut out = Vec::new();
            for tail in wildcard_variants(rest) {
                for head in [first.clone(), "*".to_string()] {
                    let mut v = vec![head];
                    v.extend(tail.iter().cloned());
                    out.push(v);
                }
            }
            out
        }
    }
}

pub fn slot_match(pattern: &[String], words: &[String]) -> bool {
    pattern.len() == words.len() && pattern.iter().zip(words).all(|(p, w)| p == "*" || p == w)
}
