//! `LRAIDX1` index file: magic, format version, vocabulary, then documents
//! as token id sequences with per-token sentence numbers. All integers are
//! little-endian u32; strings are length-prefixed UTF-8. Stems and postings
//! are rebuilt on load.

use std::io::{Cursor, Read};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{Corpus, Document};
use crate::error::{Error, Result};

const MAGIC: &[u8; 7] = b"LRAIDX1";
const VERSION: u32 = 1;

pub(super) fn has_magic(bytes: &[u8]) -> bool {
    bytes.starts_with(MAGIC)
}

pub(super) fn encode(corpus: &Corpus) -> Vec<u8> {
    let (docs, vocab) = corpus.parts();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    // Writes into a Vec cannot fail.
    out.write_u32::<LittleEndian>(VERSION).unwrap();
    out.write_u32::<LittleEndian>(vocab.len() as u32).unwrap();
    for word in vocab {
        write_str(&mut out, word);
    }
    out.write_u32::<LittleEndian>(docs.len() as u32).unwrap();
    for doc in docs {
        write_str(&mut out, &doc.name);
        out.write_u32::<LittleEndian>(doc.tokens.len() as u32).unwrap();
        for (&t, &s) in doc.tokens.iter().zip(&doc.sentence) {
            out.write_u32::<LittleEndian>(t).unwrap();
            out.write_u32::<LittleEndian>(s).unwrap();
        }
    }
    out
}

fn write_str(out: &mut Vec<u8>, s: &str) {
    out.write_u32::<LittleEndian>(s.len() as u32).unwrap();
    out.extend_from_slice(s.as_bytes());
}

pub(super) fn decode(bytes: &[u8]) -> Result<Corpus> {
    if !has_magic(bytes) {
        return Err(Error::format("index", "missing LRAIDX1 header"));
    }
    let mut r = Cursor::new(&bytes[MAGIC.len()..]);
    let bad = |_| Error::format("index", "truncated");
    let version = r.read_u32::<LittleEndian>().map_err(bad)?;
    if version != VERSION {
        return Err(Error::format("index", format!("unsupported version {version}")));
    }
    let nvocab = r.read_u32::<LittleEndian>().map_err(bad)? as usize;
    let mut vocab = Vec::with_capacity(nvocab.min(bytes.len()));
    for _ in 0..nvocab {
        vocab.push(read_str(&mut r)?);
    }
    let ndocs = r.read_u32::<LittleEndian>().map_err(bad)? as usize;
    let mut docs = Vec::with_capacity(ndocs.min(bytes.len()));
    for _ in 0..ndocs {
        let name = read_str(&mut r)?;
        let ntok = r.read_u32::<LittleEndian>().map_err(bad)? as usize;
        let mut tokens = Vec::with_capacity(ntok.min(bytes.len()));
        let mut sentence = Vec::with_capacity(ntok.min(bytes.len()));
        for _ in 0..ntok {
            let t = r.read_u32::<LittleEndian>().map_err(bad)?;
            let s = r.read_u32::<LittleEndian>().map_err(bad)?;
            if t as usize >= vocab.len() {
                return Err(Error::format("index", format!("token id {t} out of range")));
            }
            if sentence.last().is_some_and(|&prev| s < prev) {
                return Err(Error::format("index", "sentence numbers decrease"));
            }
            tokens.push(t);
            sentence.push(s);
        }
        docs.push(Document { name, tokens, sentence });
    }
    if (r.position() as usize) != r.get_ref().len() {
        return Err(Error::format("index", "trailing bytes"));
    }
    Ok(Corpus::assemble(docs, vocab))
}

fn read_str(r: &mut Cursor<&[u8]>) -> Result<String> {
    let len = r
        .read_u32::<LittleEndian>()
        .map_err(|_| Error::format("index", "truncated"))? as usize;
    let remaining = r.get_ref().len() - r.position() as usize;
    if len > remaining {
        return Err(Error::format("index", "truncated string"));
    }
    let mut buf = vec![0; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|_| Error::format("index", "string is not UTF-8"))
}
