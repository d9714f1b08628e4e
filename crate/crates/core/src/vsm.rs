//! The joining-term vector space baseline.
//!
//! A pair `A:B` becomes the vector of `ln(count + 1)` over the phrases
//! `A J B` and `B J A` for every joining term `J`; pairs are compared by
//! cosine.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::Path;

use crate::corpus::{tokenize, Corpus, PhraseQuery};
use crate::error::{Error, Result};
use crate::pairspace::WordPair;
use crate::similarity::cosine;

const DEFAULT_TERMS: &str = include_str!("../data/joining_terms.txt");

/// Ordered joining terms, each one or more tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoiningTerms {
    terms: Vec<Vec<String>>,
}

impl JoiningTerms {
    /// Common English prepositions, conjunctions and short verb phrases.
    /// A hand-picked list of 64 terms.
    pub fn default_list() -> JoiningTerms {
        Self::parse(DEFAULT_TERMS, "joining_terms.txt").expect("bundled list is valid")
    }

    /// One term per line. Blank lines are skipped. Terms are tokenized like
    /// the corpus, and two terms with the same tokens are a duplicate.
    pub fn parse(text: &str, source_name: &str) -> Result<JoiningTerms> {
        let mut seen = HashSet::new();
        let mut terms = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let tokens = tokenize(line);
            if tokens.is_empty() {
                return Err(Error::parse(source_name, i + 1, format!("term {line:?} has no words")));
            }
            if !seen.insert(tokens.clone()) {
                return Err(Error::parse(source_name, i + 1, format!("duplicate term {line:?}")));
            }
            terms.push(tokens);
        }
        if terms.is_empty() {
            return Err(Error::format("joining terms", "no terms"));
        }
        Ok(JoiningTerms { terms })
    }

    pub fn load(path: &Path) -> Result<JoiningTerms> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Vec<String>] {
        &self.terms
    }
}

/// Phrase counts behind a VSM vector: element `2t` counts `A J_t B`,
/// element `2t + 1` counts `B J_t A`.
pub fn vsm_counts(pair: &WordPair, corpus: &Corpus, terms: &JoiningTerms) -> Vec<usize> {
    let lengths: BTreeSet<usize> = terms.terms.iter().map(Vec::len).collect();
    let mut forward: HashMap<Vec<String>, usize> = HashMap::new();
    let mut backward: HashMap<Vec<String>, usize> = HashMap::new();
    for &len in &lengths {
        for (left, right, into) in [(&pair.a, &pair.b, &mut forward), (&pair.b, &pair.a, &mut backward)] {
            let query = PhraseQuery {
                left,
                right,
                min_inter: len,
                max_inter: len,
            };
            for m in corpus.find_phrases(&query) {
                *into.entry(m.intervening).or_insert(0) += 1;
            }
        }
    }
    terms
        .terms
        .iter()
        .flat_map(|t| [forward.get(t).copied().unwrap_or(0), backward.get(t).copied().unwrap_or(0)])
        .collect()
}

/// `ln(count + 1)` of [`vsm_counts`].
pub fn vsm_vector(pair: &WordPair, corpus: &Corpus, terms: &JoiningTerms) -> Vec<f64> {
    vsm_counts(pair, corpus, terms)
        .into_iter()
        .map(|c| (c as f64 + 1.0).ln())
        .collect()
}

pub fn vsm_similarity(first: &WordPair, second: &WordPair, corpus: &Corpus, terms: &JoiningTerms) -> f64 {
    cosine(&vsm_vector(first, corpus, terms), &vsm_vector(second, corpus, terms))
}
