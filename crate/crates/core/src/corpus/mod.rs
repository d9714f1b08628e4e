//! Tokenized corpus with a positional index over stems.
//!
//! The corpus answers the one query the pipeline needs: every window that
//! starts with one word, ends with another and has a bounded number of
//! intervening tokens. Endpoints match by Porter stem, so `printers` and
//! `printer` are interchangeable. Windows never cross a document or a
//! sentence boundary (`.`, `!` or `?`).

mod persist;
pub mod porter;

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub use porter::stem;

pub type TokenId = u32;
pub type StemId = u32;

/// Lowercased alphanumeric runs of `text`, in order.
pub fn tokenize(text: &str) -> Vec<String> {
    split_sentences(text).into_iter().flatten().collect()
}

/// Tokens grouped by sentence. Empty sentences are dropped.
fn split_sentences(text: &str) -> Vec<Vec<String>> {
    let mut sentences = Vec::new();
    let mut current = Vec::new();
    let mut word = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            word.extend(ch.to_lowercase());
            continue;
        }
        if !word.is_empty() {
            current.push(std::mem::take(&mut word));
        }
        if matches!(ch, '.' | '!' | '?') && !current.is_empty() {
            sentences.push(std::mem::take(&mut current));
        }
    }
    if !word.is_empty() {
        current.push(word);
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    sentences
}

/// Normalizes a query word the way corpus tokens are normalized. Returns
/// `None` unless the word is exactly one token.
pub fn normalize_word(word: &str) -> Option<String> {
    let mut tokens = tokenize(word);
    if tokens.len() == 1 {
        tokens.pop()
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Document {
    pub(crate) name: String,
    pub(crate) tokens: Vec<TokenId>,
    /// Sentence index of every token, non-decreasing.
    pub(crate) sentence: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhraseQuery<'a> {
    pub left: &'a str,
    pub right: &'a str,
    pub min_inter: usize,
    pub max_inter: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhraseMatch {
    pub doc_id: usize,
    pub start_pos: usize,
    /// Surface forms of the tokens strictly between the endpoints.
    pub intervening: Vec<String>,
}

/// An immutable tokenized corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    docs: Vec<Document>,
    vocab: Vec<String>,
    token_stem: Vec<StemId>,
    stems: Vec<String>,
    stem_ids: HashMap<String, StemId>,
    /// Per stem, every (doc, pos) occurrence in corpus order.
    postings: Vec<Vec<(u32, u32)>>,
}

impl Corpus {
    /// Builds a corpus from named texts; each text is one document.
    pub fn from_texts<I, N, T>(texts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (N, T)>,
        N: Into<String>,
        T: AsRef<str>,
    {
        let mut vocab: Vec<String> = Vec::new();
        let mut ids: HashMap<String, TokenId> = HashMap::new();
        let mut docs = Vec::new();
        for (name, text) in texts {
            let mut tokens = Vec::new();
            let mut sentence = Vec::new();
            for (s, words) in split_sentences(text.as_ref()).into_iter().enumerate() {
                for w in words {
                    let id = *ids.entry(w).or_insert_with_key(|w| {
                        vocab.push(w.clone());
                        (vocab.len() - 1) as TokenId
                    });
                    tokens.push(id);
                    sentence.push(s as u32);
                }
            }
            docs.push(Document {
                name: name.into(),
                tokens,
                sentence,
            });
        }
        if docs.iter().all(|d| d.tokens.is_empty()) {
            return Err(Error::EmptyCorpus);
        }
        Ok(Self::assemble(docs, vocab))
    }

    /// Reads one file, or every regular file below a directory in path
    /// order. Hidden files are skipped.
    pub fn from_path(path: &Path) -> Result<Self> {
        let files = collect_files(path)?;
        let mut texts = Vec::with_capacity(files.len());
        for file in files {
            let bytes = std::fs::read(&file).map_err(|source| Error::Read {
                path: file.clone(),
                source,
            })?;
            let text = String::from_utf8(bytes).map_err(|_| Error::NotUtf8 { path: file.clone() })?;
            let name = file
                .strip_prefix(path)
                .ok()
                .filter(|p| !p.as_os_str().is_empty())
                .unwrap_or(&file)
                .display()
                .to_string();
            texts.push((name, text));
        }
        if texts.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Self::from_texts(texts)
    }

    /// Stems the vocabulary and builds postings.
    pub(crate) fn assemble(docs: Vec<Document>, vocab: Vec<String>) -> Self {
        let mut stems = Vec::new();
        let mut stem_ids: HashMap<String, StemId> = HashMap::new();
        let token_stem: Vec<StemId> = vocab
            .iter()
            .map(|w| {
                *stem_ids.entry(stem(w)).or_insert_with_key(|s| {
                    stems.push(s.clone());
                    (stems.len() - 1) as StemId
                })
            })
            .collect();
        let mut postings = vec![Vec::new(); stems.len()];
        for (d, doc) in docs.iter().enumerate() {
            for (p, &t) in doc.tokens.iter().enumerate() {
                postings[token_stem[t as usize] as usize].push((d as u32, p as u32));
            }
        }
        Corpus {
            docs,
            vocab,
            token_stem,
            stems,
            stem_ids,
            postings,
        }
    }

    pub fn num_documents(&self) -> usize {
        self.docs.len()
    }

    pub fn num_tokens(&self) -> usize {
        self.docs.iter().map(|d| d.tokens.len()).sum()
    }

    pub fn document_name(&self, doc_id: usize) -> &str {
        &self.docs[doc_id].name
    }

    /// Surface tokens of a document.
    pub fn document_tokens(&self, doc_id: usize) -> impl Iterator<Item = &str> + '_ {
        self.docs[doc_id].tokens.iter().map(|&t| self.vocab[t as usize].as_str())
    }

    pub fn token(&self, doc_id: usize, pos: usize) -> &str {
        &self.vocab[self.docs[doc_id].tokens[pos] as usize]
    }

    pub fn sentence_of(&self, doc_id: usize, pos: usize) -> u32 {
        self.docs[doc_id].sentence[pos]
    }

    /// Stem id of a (lowercased) word, if the stem occurs in the corpus.
    pub fn stem_id(&self, word: &str) -> Option<StemId> {
        let w = normalize_word(word)?;
        self.stem_ids.get(&stem(&w)).copied()
    }

    /// Occurrences of the stem of `word`.
    pub fn frequency(&self, word: &str) -> usize {
        self.stem_id(word).map_or(0, |s| self.postings[s as usize].len())
    }

    /// Every window `left … right` with between `min_inter` and `max_inter`
    /// intervening tokens, ordered by (document, start position).
    ///
    /// `left` and `right` are words; both are stemmed before matching. An
    /// unknown stem yields no matches.
    pub fn find_phrases(&self, query: &PhraseQuery<'_>) -> Vec<PhraseMatch> {
        let (Some(l), Some(r)) = (self.stem_id(query.left), self.stem_id(query.right)) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        self.scan_windows(l, r, query.min_inter, query.max_inter, |doc, start, end| {
            out.push(PhraseMatch {
                doc_id: doc,
                start_pos: start,
                intervening: (start + 1..end).map(|p| self.token(doc, p).to_string()).collect(),
            });
        });
        out
    }

    /// Number of windows joining `a` and `b` in either order with at most
    /// `max_len` tokens, endpoints included.
    pub fn phrase_frequency(&self, a: &str, b: &str, max_len: usize) -> usize {
        assert!(max_len >= 2, "phrase length bound below 2");
        let (Some(sa), Some(sb)) = (self.stem_id(a), self.stem_id(b)) else {
            return 0;
        };
        let mut n = 0;
        self.scan_windows(sa, sb, 0, max_len - 2, |_, _, _| n += 1);
        self.scan_windows(sb, sa, 0, max_len - 2, |_, _, _| n += 1);
        n
    }

    /// Calls `hit(doc, start, end)` for every window in corpus order. Drives
    /// the scan from whichever endpoint has fewer postings.
    fn scan_windows(
        &self,
        left: StemId,
        right: StemId,
        min_inter: usize,
        max_inter: usize,
        mut hit: impl FnMut(usize, usize, usize),
    ) {
        let lp = &self.postings[left as usize];
        let rp = &self.postings[right as usize];
        if lp.len() <= rp.len() {
            for &(d, p) in lp {
                let doc = &self.docs[d as usize];
                let (d, p) = (d as usize, p as usize);
                for gap in min_inter..=max_inter {
                    let end = p + gap + 1;
                    if end >= doc.tokens.len() || doc.sentence[end] != doc.sentence[p] {
                        break;
                    }
                    if self.token_stem[doc.tokens[end] as usize] == right {
                        hit(d, p, end);
                    }
                }
            }
        } else {
            let mut found = Vec::new();
            for &(d, e) in rp {
                let doc = &self.docs[d as usize];
                let e = e as usize;
                for gap in min_inter..=max_inter {
                    let Some(start) = e.checked_sub(gap + 1) else { break };
                    if doc.sentence[start] != doc.sentence[e] {
                        break;
                    }
                    if self.token_stem[doc.tokens[start] as usize] == left {
                        found.push((d as usize, start, e));
                    }
                }
            }
            found.sort_unstable();
            for (d, s, e) in found {
                hit(d, s, e);
            }
        }
    }

    /// Serializes to the versioned `LRAIDX1` format. Identical corpora give
    /// identical bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        persist::encode(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        persist::decode(bytes)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    /// Loads a persisted index file, or builds from text when `path` is a
    /// directory or a file without the index header.
    pub fn open(path: &Path) -> Result<Self> {
        if path.is_file() {
            let bytes = std::fs::read(path).map_err(|source| Error::Read {
                path: path.to_path_buf(),
                source,
            })?;
            if persist::has_magic(&bytes) {
                return Self::from_bytes(&bytes);
            }
        }
        Self::from_path(path)
    }

    pub(crate) fn parts(&self) -> (&[Document], &[String]) {
        (&self.docs, &self.vocab)
    }
}

fn collect_files(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    if !path.is_dir() {
        return Err(Error::Read {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or directory"),
        });
    }
    let mut files = Vec::new();
    let walker = walkdir::WalkDir::new(path)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || !e.file_name().to_string_lossy().starts_with('.'));
    for entry in walker {
        let entry = entry.map_err(|e| Error::Read {
            path: e.path().map_or_else(|| path.to_path_buf(), Path::to_path_buf),
            source: e.into(),
        })?;
        if entry.file_type().is_file() {
            files.push(entry.into_path());
        }
    }
    Ok(files)
}
