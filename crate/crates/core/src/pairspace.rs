//! Word pairs and their thesaurus reformulations.
//!
//! Each original pair `A:B` gets candidate alternates `A':B` and `A:B'`
//! from the top thesaurus neighbors of each member. Candidates are ranked by
//! how often the two words are joined by a short phrase in the corpus and
//! only the most frequent few survive.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::thesaurus::Thesaurus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PartOfSpeech {
    #[default]
    Noun,
    Verb,
    Adj,
    Adv,
}

impl FromStr for PartOfSpeech {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "noun" | "n" => Ok(PartOfSpeech::Noun),
            "verb" | "v" => Ok(PartOfSpeech::Verb),
            "adj" | "a" | "adjective" | "s" => Ok(PartOfSpeech::Adj),
            "adv" | "r" | "adverb" => Ok(PartOfSpeech::Adv),
            other => Err(format!("unknown part of speech {other:?}")),
        }
    }
}

impl fmt::Display for PartOfSpeech {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartOfSpeech::Noun => "noun",
            PartOfSpeech::Verb => "verb",
            PartOfSpeech::Adj => "adj",
            PartOfSpeech::Adv => "adv",
        })
    }
}

/// An ordered pair of distinct lowercase words.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WordPair {
    pub a: String,
    pub b: String,
    #[serde(default)]
    pub pos_a: PartOfSpeech,
    #[serde(default)]
    pub pos_b: PartOfSpeech,
}

impl WordPair {
    pub fn new(a: &str, b: &str) -> Result<Self> {
        Self::with_pos(a, b, PartOfSpeech::Noun, PartOfSpeech::Noun)
    }

    pub fn with_pos(a: &str, b: &str, pos_a: PartOfSpeech, pos_b: PartOfSpeech) -> Result<Self> {
        let a = a.trim().to_lowercase();
        let b = b.trim().to_lowercase();
        if a.is_empty() || b.is_empty() {
            return Err(Error::Contract("pair members must be non-empty".into()));
        }
        if a == b {
            return Err(Error::Contract(format!("pair members must differ: {a}:{b}")));
        }
        Ok(WordPair { a, b, pos_a, pos_b })
    }

    /// `B:A`, parts of speech swapped along with the words.
    pub fn reversed(&self) -> WordPair {
        WordPair {
            a: self.b.clone(),
            b: self.a.clone(),
            pos_a: self.pos_b,
            pos_b: self.pos_a,
        }
    }

    /// Lookup key ignoring parts of speech.
    pub fn key(&self) -> (String, String) {
        (self.a.clone(), self.b.clone())
    }

    /// Parses `a:b`, `a b`, or either followed by a `pos_a:pos_b` field such
    /// as `n:n`.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let fields: Vec<&str> = text.split_whitespace().collect();
        let (a, b, pos) = match fields.as_slice() {
            [pair] => {
                let (a, b) = pair.split_once(':').ok_or_else(|| format!("expected a:b, got {pair:?}"))?;
                (a, b, None)
            }
            [first, second] if first.contains(':') && !second.contains(':') => {
                return Err(format!("cannot parse pair {text:?}"));
            }
            [first, second] if first.contains(':') => {
                let (a, b) = first.split_once(':').unwrap();
                (a, b, Some(*second))
            }
            [a, b] => (*a, *b, None),
            [a, b, pos] => (*a, *b, Some(*pos)),
            _ => return Err(format!("cannot parse pair {text:?}")),
        };
        let (pos_a, pos_b) = match pos {
            None => (PartOfSpeech::Noun, PartOfSpeech::Noun),
            Some(p) => {
                let (pa, pb) = p.split_once(':').ok_or_else(|| format!("expected pos:pos, got {p:?}"))?;
                (pa.parse()?, pb.parse()?)
            }
        };
        WordPair::with_pos(a, b, pos_a, pos_b).map_err(|e| e.to_string())
    }
}

impl fmt::Display for WordPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.a, self.b)
    }
}

/// Which member of the original an alternate replaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Replaced {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alternate {
    pub pair: WordPair,
    pub replaced: Replaced,
    /// Position of the substitute in its thesaurus list, from 0.
    pub rank: usize,
    pub frequency: usize,
}

impl Alternate {
    fn reversed(&self) -> Alternate {
        Alternate {
            pair: self.pair.reversed(),
            replaced: match self.replaced {
                Replaced::A => Replaced::B,
                Replaced::B => Replaced::A,
            },
            rank: self.rank,
            frequency: self.frequency,
        }
    }
}

/// An original pair and the alternates kept for it, most frequent first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairVersions {
    pub original: WordPair,
    pub alternates: Vec<Alternate>,
}

impl PairVersions {
    /// The original followed by the alternates.
    pub fn versions(&self) -> impl Iterator<Item = &WordPair> {
        std::iter::once(&self.original).chain(self.alternates.iter().map(|a| &a.pair))
    }

    /// Versions of `B:A`: every version with its members swapped.
    pub fn reversed(&self) -> PairVersions {
        PairVersions {
            original: self.original.reversed(),
            alternates: self.alternates.iter().map(Alternate::reversed).collect(),
        }
    }
}

/// Candidate alternates `A':B` for the top `num_sim` neighbors `A'` of `A`,
/// then `A:B'` for those of `B`. Candidates that repeat the original, repeat
/// an earlier candidate, or would pair a word with itself are dropped.
pub fn generate_alternates(pair: &WordPair, thesaurus: &Thesaurus, num_sim: usize) -> Vec<Alternate> {
    assert!(num_sim >= 1, "num_sim must be at least 1");
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let a_side = thesaurus
        .top_similar(&pair.a, pair.pos_a, num_sim)
        .into_iter()
        .enumerate()
        .map(|(rank, w)| (Replaced::A, rank, w.to_string(), pair.b.clone()));
    let b_side = thesaurus
        .top_similar(&pair.b, pair.pos_b, num_sim)
        .into_iter()
        .enumerate()
        .map(|(rank, w)| (Replaced::B, rank, pair.a.clone(), w.to_string()));
    for (replaced, rank, a, b) in a_side.chain(b_side) {
        if a == b || (a == pair.a && b == pair.b) || !seen.insert((a.clone(), b.clone())) {
            continue;
        }
        out.push(Alternate {
            pair: WordPair {
                a,
                b,
                pos_a: pair.pos_a,
                pos_b: pair.pos_b,
            },
            replaced,
            rank,
            frequency: 0,
        });
    }
    out
}

/// Keeps the `num_filter` candidates joined most often by phrases of at most
/// `max_phrase` words. Ties go to the better thesaurus rank, then to the
/// lexicographically smaller pair. Candidates never joined are dropped even
/// when fewer than `num_filter` remain.
pub fn filter_alternates(
    original: &WordPair,
    candidates: Vec<Alternate>,
    corpus: &Corpus,
    num_filter: usize,
    max_phrase: usize,
) -> PairVersions {
    let mut scored: Vec<Alternate> = candidates
        .into_iter()
        .map(|mut c| {
            c.frequency = corpus.phrase_frequency(&c.pair.a, &c.pair.b, max_phrase);
            c
        })
        .filter(|c| c.frequency > 0)
        .collect();
    scored.sort_by(|x, y| {
        y.frequency
            .cmp(&x.frequency)
            .then(x.rank.cmp(&y.rank))
            .then_with(|| (&x.pair.a, &x.pair.b).cmp(&(&y.pair.a, &y.pair.b)))
    });
    scored.truncate(num_filter);
    PairVersions {
        original: original.clone(),
        alternates: scored,
    }
}

/// Steps 1 and 2 for a batch of originals, in input order.
pub fn build_versions(
    pairs: &[WordPair],
    thesaurus: &Thesaurus,
    corpus: &Corpus,
    num_sim: usize,
    num_filter: usize,
    max_phrase: usize,
) -> Vec<PairVersions> {
    pairs
        .par_iter()
        .map(|p| {
            let candidates = generate_alternates(p, thesaurus, num_sim);
            filter_alternates(p, candidates, corpus, num_filter, max_phrase)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thesaurus(text: &str) -> Thesaurus {
        Thesaurus::parse(text, "t").unwrap()
    }

    #[test]
    fn pair_invariants() {
        assert!(WordPair::new("Cat", "cat").is_err());
        assert!(WordPair::new("", "cat").is_err());
        let p = WordPair::new("Mason", "stone").unwrap();
        assert_eq!(p.to_string(), "mason:stone");
        assert_eq!(p.reversed().to_string(), "stone:mason");
    }

    #[test]
    fn parses_pair_forms() {
        assert_eq!(WordPair::parse("cat:meow").unwrap(), WordPair::new("cat", "meow").unwrap());
        assert_eq!(WordPair::parse("cat meow").unwrap(), WordPair::new("cat", "meow").unwrap());
        let p = WordPair::parse("run fast v:r").unwrap();
        assert_eq!((p.pos_a, p.pos_b), (PartOfSpeech::Verb, PartOfSpeech::Adv));
        let p = WordPair::parse("big:dog a:n").unwrap();
        assert_eq!((p.pos_a, p.pos_b), (PartOfSpeech::Adj, PartOfSpeech::Noun));
        assert!(WordPair::parse("cat").is_err());
        assert!(WordPair::parse("a b c d").is_err());
        assert!(WordPair::parse("a b x:y").is_err());
    }

    #[test]
    fn one_neighbor_each_side() {
        let t = thesaurus("a\tnoun\tx:0.9\nb\tnoun\ty:0.8\n");
        let p = WordPair::new("a", "b").unwrap();
        let got: Vec<String> = generate_alternates(&p, &t, 1).iter().map(|c| c.pair.to_string()).collect();
        assert_eq!(got, ["x:b", "a:y"]);
    }

    #[test]
    fn ten_neighbors_give_twenty_candidates() {
        let list = |p: &str| (0..12).map(|i| format!("{p}{i}:{:.2}", 0.9 - i as f64 * 0.05)).collect::<Vec<_>>().join(",");
        let t = thesaurus(&format!("a\tnoun\t{}\nb\tnoun\t{}\n", list("x"), list("y")));
        let p = WordPair::new("a", "b").unwrap();
        assert_eq!(generate_alternates(&p, &t, 10).len(), 20);
    }

    #[test]
    fn absent_words_and_self_pairs() {
        let t = thesaurus("a\tnoun\tb:0.9,c:0.5\n");
        let p = WordPair::new("zz", "yy").unwrap();
        assert!(generate_alternates(&p, &t, 10).is_empty());
        // a's neighbor b would form b:b
        let p = WordPair::new("a", "b").unwrap();
        let got: Vec<String> = generate_alternates(&p, &t, 10).iter().map(|c| c.pair.to_string()).collect();
        assert_eq!(got, ["c:b"]);
    }

    #[test]
    fn filter_keeps_most_frequent_and_drops_unseen() {
        let corpus = Corpus::from_texts([(
            "d",
            "x1 of b. x1 of b. x1 of b. x2 in b. x2 in b. a to y1. a to y1. x3 by b",
        )])
        .unwrap();
        let t = thesaurus("a\tnoun\tx1:0.9,x2:0.8,x3:0.7,x4:0.6\nb\tnoun\ty1:0.9,y2:0.5\n");
        let p = WordPair::new("a", "b").unwrap();
        let cands = generate_alternates(&p, &t, 10);
        assert_eq!(cands.len(), 6);
        let v = filter_alternates(&p, cands, &corpus, 3, 5);
        let kept: Vec<(String, usize)> = v.alternates.iter().map(|a| (a.pair.to_string(), a.frequency)).collect();
        assert_eq!(kept, [("x1:b".to_string(), 3), ("a:y1".to_string(), 2), ("x2:b".to_string(), 2)]);
        let v = filter_alternates(&p, generate_alternates(&p, &t, 10), &corpus, 10, 5);
        assert_eq!(v.alternates.len(), 4);
        assert!(filter_alternates(&p, Vec::new(), &corpus, 3, 5).alternates.is_empty());
    }

    #[test]
    fn reversing_versions_swaps_every_member() {
        let corpus = Corpus::from_texts([("d", "x1 of b")]).unwrap();
        let t = thesaurus("a\tnoun\tx1:0.9\n");
        let p = WordPair::new("a", "b").unwrap();
        let v = filter_alternates(&p, generate_alternates(&p, &t, 10), &corpus, 3, 5);
        let r = v.reversed();
        assert_eq!(r.original.to_string(), "b:a");
        assert_eq!(r.alternates[0].pair.to_string(), "b:x1");
        assert_eq!(r.alternates[0].replaced, Replaced::B);
        assert_eq!(r.reversed(), v);
    }
}
