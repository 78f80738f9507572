//! Lexicon-driven text segmentation and term frequencies.
//!
//! Segmentation is greedy forward maximum matching: at each position the
//! longest lexicon entry starting there is taken; when nothing matches, the
//! single character is emitted. This is deterministic and has exact recall
//! on lexicon entries, which is all the downstream keyword counting needs.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Segmentation lexicon: match entries plus a stopword list.
#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: HashSet<String>,
    stopwords: HashSet<String>,
    /// Length in characters of the longest entry.
    max_entry_len: usize,
}

impl Lexicon {
    /// Build a lexicon from entries and stopwords. Entries must be non-empty.
    pub fn new<I, J>(entries: I, stopwords: J) -> Result<Self>
    where
        I: IntoIterator<Item = String>,
        J: IntoIterator<Item = String>,
    {
        let entries: HashSet<String> =
            entries.into_iter().filter(|e| !e.is_empty()).collect();
        if entries.is_empty() {
            return Err(Error::Argument("lexicon has no entries".into()));
        }
        let max_entry_len = entries.iter().map(|e| e.chars().count()).max().unwrap_or(0);
        let stopwords = stopwords.into_iter().collect();
        Ok(Lexicon { entries, stopwords, max_entry_len })
    }

    /// Load from one-entry-per-line UTF-8 files. Blank lines are ignored.
    pub fn from_files(lexicon_path: &Path, stopword_path: Option<&Path>) -> Result<Self> {
        let entries = read_lines(lexicon_path)?;
        let stopwords = match stopword_path {
            Some(p) => read_lines(p)?,
            None => Vec::new(),
        };
        Lexicon::new(entries, stopwords)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.entries.contains(token)
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    pub fn max_entry_len(&self) -> usize {
        self.max_entry_len
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if !trimmed.is_empty() {
            out.push(trimmed.to_string());
        }
    }
    Ok(out)
}

/// Forward maximum matching without any filtering.
///
/// The concatenation of the returned tokens reconstructs `text` exactly.
pub fn segment_raw(text: &str, lex: &Lexicon) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let max_len = lex.max_entry_len().min(chars.len() - pos);
        let mut matched = None;
        for len in (2..=max_len).rev() {
            let candidate: String = chars[pos..pos + len].iter().collect();
            if lex.contains(&candidate) {
                matched = Some((candidate, len));
                break;
            }
        }
        let (token, len) = match matched {
            Some(m) => m,
            // Single-character fallback; also covers 1-char lexicon entries.
            None => (chars[pos].to_string(), 1),
        };
        tokens.push(token);
        pos += len;
    }
    tokens
}

/// Segment `text`, dropping stopwords and tokens with no alphanumeric
/// character (whitespace and punctuation fallbacks).
pub fn segment(text: &str, lex: &Lexicon) -> Vec<String> {
    segment_raw(text, lex)
        .into_iter()
        .filter(|t| is_content_token(t, lex))
        .collect()
}

fn is_content_token(token: &str, lex: &Lexicon) -> bool {
    !lex.is_stopword(token) && token.chars().any(char::is_alphanumeric)
}

/// Token counts with their total. Iteration order is lexicographic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermCounts {
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl TermCounts {
    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn get(&self, token: &str) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    fn add(&mut self, token: String) {
        *self.counts.entry(token).or_insert(0) += 1;
        self.total += 1;
    }
}

/// Count tokens over all documents' title and body.
pub fn term_frequencies(corpus: &Corpus, lex: &Lexicon) -> TermCounts {
    let mut tc = TermCounts::default();
    for doc in corpus.documents() {
        for token in segment(&doc.title, lex) {
            tc.add(token);
        }
        for token in segment(&doc.body, lex) {
            tc.add(token);
        }
    }
    tc
}

/// The `n` highest-count tokens, count-descending, ties broken
/// lexicographically. `n` larger than the vocabulary returns everything.
pub fn top_terms(tc: &TermCounts, n: usize) -> Vec<(String, u64)> {
    let mut items: Vec<(String, u64)> =
        tc.counts().iter().map(|(t, c)| (t.clone(), *c)).collect();
    items.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    items.truncate(n);
    items
}
