//! Ranked synonym lists.
//!
//! One entry per line: `headword<TAB>pos<TAB>word:score,word:score,…` with
//! scores in (0, 1] listed in non-increasing order. Equal scores keep file
//! order.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairspace::PartOfSpeech;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThesaurusEntry {
    pub headword: String,
    pub pos: PartOfSpeech,
    pub neighbors: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Default)]
pub struct Thesaurus {
    entries: Vec<ThesaurusEntry>,
    index: HashMap<(String, PartOfSpeech), usize>,
}

impl Thesaurus {
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut thesaurus = Thesaurus::default();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let entry = parse_line(line).map_err(|reason| Error::parse(source_name, lineno, reason))?;
            let key = (entry.headword.clone(), entry.pos);
            if thesaurus.index.contains_key(&key) {
                return Err(Error::parse(
                    source_name,
                    lineno,
                    format!("duplicate entry {} ({})", entry.headword, entry.pos),
                ));
            }
            thesaurus.index.insert(key, thesaurus.entries.len());
            thesaurus.entries.push(entry);
        }
        Ok(thesaurus)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ThesaurusEntry] {
        &self.entries
    }

    pub fn entry(&self, word: &str, pos: PartOfSpeech) -> Option<&ThesaurusEntry> {
        self.index
            .get(&(word.to_lowercase(), pos))
            .map(|&i| &self.entries[i])
    }

    /// The first `n` neighbors of `word` in rank order; empty when the word
    /// has no entry for `pos`.
    pub fn top_similar(&self, word: &str, pos: PartOfSpeech, n: usize) -> Vec<&str> {
        self.top_similar_scored(word, pos, n).into_iter().map(|(w, _)| w).collect()
    }

    pub fn top_similar_scored(&self, word: &str, pos: PartOfSpeech, n: usize) -> Vec<(&str, f64)> {
        self.entry(word, pos).map_or_else(Vec::new, |e| {
            e.neighbors.iter().take(n).map(|(w, s)| (w.as_str(), *s)).collect()
        })
    }

    /// Canonical text form; parsing it back yields the same thesaurus.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for ThesaurusEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t", self.headword, self.pos)?;
        for (i, (w, s)) in self.neighbors.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{w}:{s}")?;
        }
        Ok(())
    }
}

fn parse_line(line: &str) -> std::result::Result<ThesaurusEntry, String> {
    let mut fields = line.split('\t');
    let (Some(head), Some(pos), Some(list), None) = (fields.next(), fields.next(), fields.next(), fields.next())
    else {
        return Err("expected three tab-separated fields".into());
    };
    let headword = head.trim().to_lowercase();
    if headword.is_empty() {
        return Err("empty headword".into());
    }
    let pos = PartOfSpeech::from_str(pos.trim())?;
    let mut neighbors: Vec<(String, f64)> = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (word, score) = item
            .rsplit_once(':')
            .ok_or_else(|| format!("neighbor {item:?} is not word:score"))?;
        let word = word.trim().to_lowercase();
        if word.is_empty() {
            return Err(format!("empty neighbor in {item:?}"));
        }
        let score: f64 = score
            .trim()
            .parse()
            .map_err(|_| format!("bad score in {item:?}"))?;
        if !(score > 0.0 && score <= 1.0) {
            return Err(format!("score {score} of {word:?} outside (0, 1]"));
        }
        if word == headword {
            return Err(format!("{word:?} lists itself as a neighbor"));
        }
        if let Some((prev, prev_score)) = neighbors.last() {
            if score > *prev_score {
                return Err(format!(
                    "neighbors out of order: {word:?} ({score}) after {prev:?} ({prev_score})"
                ));
            }
        }
        neighbors.push((word, score));
    }
    Ok(ThesaurusEntry { headword, pos, neighbors })
}
