//! Phrase harvesting and wildcard pattern mining.
//!
//! Every phrase joining the two members of a pair version contributes its
//! intervening words. A pattern replaces any subset of those words with
//! single-token wildcards, so a phrase with `m` intervening words yields
//! `2^m` patterns. A pattern's support is the number of distinct pair
//! versions owning at least one phrase it matches.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, PhraseQuery};
use crate::error::{Error, Result};
use crate::pairspace::PairVersions;

/// Most intervening words a pattern may have; `2^m` patterns per phrase must
/// stay enumerable.
pub const MAX_PATTERN_LEN: usize = 16;

/// Order in which a phrase mentions a pair version's members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    /// `a … b`
    Forward,
    /// `b … a`
    Reverse,
}

impl Direction {
    pub fn flipped(self) -> Direction {
        match self {
            Direction::Forward => Direction::Reverse,
            Direction::Reverse => Direction::Forward,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Phrase {
    pub direction: Direction,
    pub intervening: Vec<String>,
}

/// A directed pair version, `(a, b)`, as used for phrase lists and rows.
pub type DirectedPair = (String, String);

/// Phrases per distinct pair version, in first-seen version order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PhraseTable {
    versions: Vec<DirectedPair>,
    phrases: Vec<Vec<Phrase>>,
    index: HashMap<DirectedPair, usize>,
}

impl PhraseTable {
    pub fn new(versions: Vec<DirectedPair>, phrases: Vec<Vec<Phrase>>) -> Self {
        assert_eq!(versions.len(), phrases.len());
        let index = versions.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        PhraseTable { versions, phrases, index }
    }

    pub fn versions(&self) -> &[DirectedPair] {
        &self.versions
    }

    pub fn len(&self) -> usize {
        self.versions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.versions.is_empty()
    }

    pub fn get(&self, pair: &DirectedPair) -> Option<&[Phrase]> {
        self.index.get(pair).map(|&i| self.phrases[i].as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DirectedPair, &[Phrase])> {
        self.versions.iter().zip(self.phrases.iter().map(Vec::as_slice))
    }

    pub fn total_phrases(&self) -> usize {
        self.phrases.iter().map(Vec::len).sum()
    }
}

/// Distinct pair versions of all originals, in order. A version whose
/// reverse is already listed is the same pair seen from the other side and
/// is not listed again.
pub fn distinct_versions(pair_versions: &[PairVersions]) -> Vec<DirectedPair> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for pv in pair_versions {
        for v in pv.versions() {
            let key = (v.a.clone(), v.b.clone());
            if seen.contains(&key) || seen.contains(&(v.b.clone(), v.a.clone())) {
                continue;
            }
            seen.insert(key.clone());
            out.push(key);
        }
    }
    out
}

/// Every phrase in either direction with `min_inter..=max_inter`
/// intervening words, for each distinct pair version.
pub fn harvest_phrases(
    pair_versions: &[PairVersions],
    corpus: &Corpus,
    min_inter: usize,
    max_inter: usize,
) -> PhraseTable {
    let versions = distinct_versions(pair_versions);
    let phrases = versions
        .par_iter()
        .map(|(a, b)| {
            let fwd = corpus.find_phrases(&PhraseQuery {
                left: a,
                right: b,
                min_inter,
                max_inter,
            });
            let rev = corpus.find_phrases(&PhraseQuery {
                left: b,
                right: a,
                min_inter,
                max_inter,
            });
            fwd.into_iter()
                .map(|m| Phrase {
                    direction: Direction::Forward,
                    intervening: m.intervening,
                })
                .chain(rev.into_iter().map(|m| Phrase {
                    direction: Direction::Reverse,
                    intervening: m.intervening,
                }))
                .collect()
        })
        .collect();
    PhraseTable::new(versions, phrases)
}

/// One position of a pattern. Wildcards sort before literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    Wildcard,
    Literal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pattern {
    pub slots: Vec<Slot>,
}

impl Pattern {
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn wildcards(&self) -> usize {
        self.slots.iter().filter(|s| matches!(s, Slot::Wildcard)).count()
    }

    /// True when `tokens` has exactly this length and agrees on every
    /// literal slot.
    pub fn matches<S: AsRef<str>>(&self, tokens: &[S]) -> bool {
        tokens.len() == self.slots.len()
            && self.slots.iter().zip(tokens).all(|(slot, tok)| match slot {
                Slot::Wildcard => true,
                Slot::Literal(w) => w == tok.as_ref(),
            })
    }

    /// Parses the space-separated form written by `Display`.
    pub fn parse(text: &str) -> Result<Pattern> {
        let slots: Vec<Slot> = text
            .split_whitespace()
            .map(|t| if t == "*" { Slot::Wildcard } else { Slot::Literal(t.to_string()) })
            .collect();
        if slots.is_empty() {
            return Err(Error::format("pattern", "empty pattern"));
        }
        Ok(Pattern { slots })
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, slot) in self.slots.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match slot {
                Slot::Wildcard => f.write_str("*")?,
                Slot::Literal(w) => f.write_str(w)?,
            }
        }
        Ok(())
    }
}

/// All `2^m` patterns of `tokens`. Bit `i` of the subset mask turns slot `i`
/// into a wildcard, so mask 0 is the literal phrase.
pub fn expand_patterns<S: AsRef<str>>(tokens: &[S], max_inter: usize) -> Result<Vec<Pattern>> {
    let m = tokens.len();
    if m == 0 || m > max_inter || m > MAX_PATTERN_LEN {
        return Err(Error::Contract(format!(
            "cannot expand {m} intervening tokens (allowed 1..={})",
            max_inter.min(MAX_PATTERN_LEN)
        )));
    }
    Ok((0u32..1 << m)
        .map(|mask| Pattern {
            slots: tokens
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    if mask & (1 << i) != 0 {
                        Slot::Wildcard
                    } else {
                        Slot::Literal(t.as_ref().to_string())
                    }
                })
                .collect(),
        })
        .collect())
}

/// The retained patterns, highest support first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PatternTable {
    pub patterns: Vec<Pattern>,
    pub support: Vec<usize>,
}

impl PatternTable {
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Pattern, usize)> {
        self.patterns.iter().zip(self.support.iter().copied())
    }

    pub fn index(&self) -> HashMap<&Pattern, usize> {
        self.patterns.iter().enumerate().map(|(i, p)| (p, i)).collect()
    }

    /// `pattern<TAB>support` lines.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (p, s) in self.iter() {
            out.push_str(&format!("{p}\t{s}\n"));
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<PatternTable> {
        let mut table = PatternTable::default();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let (p, s) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse("patterns", i + 1, "expected pattern<TAB>support"))?;
            table.patterns.push(Pattern::parse(p)?);
            table.support.push(
                s.trim()
                    .parse()
                    .map_err(|_| Error::parse("patterns", i + 1, "bad support count"))?,
            );
        }
        Ok(table)
    }
}

fn table_order(x: &(Pattern, usize), y: &(Pattern, usize)) -> Ordering {
    y.1.cmp(&x.1)
        .then(x.0.wildcards().cmp(&y.0.wildcards()))
        .then_with(|| x.0.cmp(&y.0))
}

/// Counts, for every pattern of every phrase, how many pair versions own a
/// matching phrase, and keeps the `num_patterns` best. Ties prefer fewer
/// wildcards, then lexicographic slot order.
pub fn mine_top_patterns(phrases: &PhraseTable, max_inter: usize, num_patterns: usize) -> Result<PatternTable> {
    let per_version: Vec<HashSet<Pattern>> = phrases
        .phrases
        .par_iter()
        .map(|list| {
            let mut set = HashSet::new();
            let mut done = HashSet::new();
            for phrase in list {
                if done.insert(&phrase.intervening) {
                    set.extend(expand_patterns(&phrase.intervening, max_inter)?);
                }
            }
            Ok(set)
        })
        .collect::<Result<_>>()?;
    let mut counts: BTreeMap<Pattern, usize> = BTreeMap::new();
    for set in per_version {
        for p in set {
            *counts.entry(p).or_insert(0) += 1;
        }
    }
    let mut all: Vec<(Pattern, usize)> = counts.into_iter().collect();
    all.sort_by(table_order);
    all.truncate(num_patterns);
    let (patterns, support) = all.into_iter().unzip();
    Ok(PatternTable { patterns, support })
}
