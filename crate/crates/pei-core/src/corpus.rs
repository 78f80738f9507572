//! Document corpus loading, validation and filtering.
//!
//! The on-disk format is UTF-8, one JSON object per line with exactly the
//! fields `region`, `date` (`YYYY-MM-DD`), `title` and `text`. Documents are
//! kept in a deterministic order (date, region, title) so that every
//! downstream computation is reproducible from the file alone.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One government document: region tag, release date, title and main text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub region: String,
    pub date: NaiveDate,
    pub title: String,
    #[serde(rename = "text")]
    pub body: String,
}

/// An immutable, deterministically ordered collection of documents.
///
/// Duplicates (identical region+date+title+body) are kept; deduplication is
/// the upstream crawler's job. Documents with an empty body are kept as
/// publication events that contribute zero tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
    date_min: Option<NaiveDate>,
    date_max: Option<NaiveDate>,
}

impl Corpus {
    /// Build a corpus from documents, validating and sorting them.
    pub fn from_documents(mut documents: Vec<Document>) -> Result<Self> {
        for doc in &documents {
            if doc.region.trim().is_empty() {
                return Err(Error::Validation(format!(
                    "document '{}' has an empty region",
                    doc.title
                )));
            }
        }
        documents.sort_by(|a, b| {
            (a.date, &a.region, &a.title).cmp(&(b.date, &b.region, &b.title))
        });
        let date_min = documents.first().map(|d| d.date);
        let date_max = documents.last().map(|d| d.date);
        Ok(Corpus { documents, date_min, date_max })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Earliest document date; `None` for an empty corpus.
    pub fn date_min(&self) -> Option<NaiveDate> {
        self.date_min
    }

    /// Latest document date; `None` for an empty corpus.
    pub fn date_max(&self) -> Option<NaiveDate> {
        self.date_max
    }

    /// Distinct region identifiers, sorted.
    pub fn regions(&self) -> BTreeSet<String> {
        self.documents.iter().map(|d| d.region.clone()).collect()
    }
}

/// Load a corpus from a line-delimited JSON record file.
///
/// A malformed line (missing field, unparseable date) is reported as a
/// validation error naming the 1-based line number. Blank lines are skipped.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut documents = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line).map_err(|e| {
            Error::Validation(format!("{}: line {}: {}", path.display(), idx + 1, e))
        })?;
        if doc.region.trim().is_empty() {
            return Err(Error::Validation(format!(
                "{}: line {}: empty region",
                path.display(),
                idx + 1
            )));
        }
        documents.push(doc);
    }
    Corpus::from_documents(documents)
}

/// Serialize a corpus back to the line-delimited record format.
///
/// `load_corpus(save_corpus(c)) == c` for any valid corpus.
pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    for doc in corpus.documents() {
        let line = serde_json::to_string(doc)
            .map_err(|e| Error::Validation(format!("serializing document: {e}")))?;
        writeln!(writer, "{line}").map_err(|e| Error::io(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Keep documents with `from <= date <= to` and, when `regions` is given,
/// region membership. Ordering is preserved.
pub fn filter_corpus(
    corpus: &Corpus,
    from: NaiveDate,
    to: NaiveDate,
    regions: Option<&BTreeSet<String>>,
) -> Result<Corpus> {
    if from > to {
        return Err(Error::Argument(format!(
            "filter window start {from} is after end {to}"
        )));
    }
    let documents = corpus
        .documents()
        .iter()
        .filter(|d| d.date >= from && d.date <= to)
        .filter(|d| regions.is_none_or(|set| set.contains(&d.region)))
        .cloned()
        .collect();
    Corpus::from_documents(documents)
}
