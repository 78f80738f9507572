//! Entropy-weighted keyword dictionary and the daily policy effectiveness
//! index.
//!
//! For a window of `n` days and a keyword `j` with daily counts
//! `count[i][j]`:
//!
//! ```text
//! p[i][j] = count[i][j] / sum_i count[i][j]
//! d[j]    = 1 + (1/ln n) * sum_i p[i][j] * ln p[i][j]      (0·ln 0 := 0)
//! w[j]    = d[j] / sum_j d[j]
//! ```
//!
//! `d[j]` is 1 minus the normalized Shannon entropy of the keyword's daily
//! distribution: 0 for a perfectly uniform column, 1 for a one-hot column.
//! A keyword concentrated in a burst therefore dominates the index. The
//! daily index for a region is the weighted sum of that day's keyword
//! counts.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::textproc::{segment, Lexicon};

/// Keyword aspect tag from the dictionary file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TypeTag {
    A,
    B,
    C,
    D,
    E,
}

impl FromStr for TypeTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" => Ok(TypeTag::A),
            "B" => Ok(TypeTag::B),
            "C" => Ok(TypeTag::C),
            "D" => Ok(TypeTag::D),
            "E" => Ok(TypeTag::E),
            other => Err(Error::Validation(format!("unknown keyword type '{other}'"))),
        }
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            TypeTag::A => 'A',
            TypeTag::B => 'B',
            TypeTag::C => 'C',
            TypeTag::D => 'D',
            TypeTag::E => 'E',
        };
        write!(f, "{c}")
    }
}

/// An unweighted dictionary entry as read from the dictionary CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordSpec {
    pub token: String,
    pub type_tag: TypeTag,
}

/// Load a `keyword,type` CSV. Lines starting with `#` are comments.
pub fn load_keyword_specs(path: impl AsRef<Path>) -> Result<Vec<KeywordSpec>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut specs: Vec<KeywordSpec> = Vec::new();
    let mut seen = HashSet::new();
    let mut header_done = false;
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !header_done {
            header_done = true;
            if trimmed == "keyword,type" {
                continue;
            }
        }
        let (token, tag) = trimmed.rsplit_once(',').ok_or_else(|| {
            Error::Validation(format!("{}: line {}: expected 'keyword,type'", path.display(), idx + 1))
        })?;
        let token = token.trim().to_string();
        if token.is_empty() {
            return Err(Error::Validation(format!(
                "{}: line {}: empty keyword",
                path.display(),
                idx + 1
            )));
        }
        if !seen.insert(token.clone()) {
            return Err(Error::Validation(format!(
                "{}: line {}: duplicate keyword '{token}'",
                path.display(),
                idx + 1
            )));
        }
        specs.push(KeywordSpec { token, type_tag: tag.parse()? });
    }
    if specs.is_empty() {
        return Err(Error::Validation(format!(
            "{}: dictionary has no keywords",
            path.display()
        )));
    }
    Ok(specs)
}

/// Per-day keyword occurrence counts for one region and date window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordCountMatrix {
    region: String,
    dates: Vec<NaiveDate>,
    keywords: Vec<String>,
    /// `counts[i][j]`: occurrences of keyword `j` on day `i`.
    counts: Vec<Vec<u64>>,
}

impl KeywordCountMatrix {
    /// Build a matrix from explicit rows; shape is validated.
    pub fn new(
        region: impl Into<String>,
        dates: Vec<NaiveDate>,
        keywords: Vec<String>,
        counts: Vec<Vec<u64>>,
    ) -> Result<Self> {
        if counts.len() != dates.len() || counts.iter().any(|r| r.len() != keywords.len()) {
            return Err(Error::Argument(format!(
                "count matrix must be {} x {}",
                dates.len(),
                keywords.len()
            )));
        }
        Ok(KeywordCountMatrix { region: region.into(), dates, keywords, counts })
    }

    pub fn region(&self) -> &str {
        &self.region
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn n_days(&self) -> usize {
        self.dates.len()
    }

    /// Element-wise sum with an equally shaped matrix, under a new label.
    /// Used to aggregate per-region matrices into a corpus-wide one.
    pub fn merged_with(&self, other: &KeywordCountMatrix, label: &str) -> Result<Self> {
        if self.dates != other.dates || self.keywords != other.keywords {
            return Err(Error::Argument(
                "cannot merge keyword count matrices with different shapes".into(),
            ));
        }
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(KeywordCountMatrix {
            region: label.to_string(),
            dates: self.dates.clone(),
            keywords: self.keywords.clone(),
            counts,
        })
    }
}

fn date_range(from: NaiveDate, to: NaiveDate) -> Result<Vec<NaiveDate>> {
    if from > to {
        return Err(Error::Argument(format!("window start {from} is after end {to}")));
    }
    let mut dates = Vec::new();
    let mut d = from;
    while d <= to {
        dates.push(d);
        d = d.succ_opt().expect("date overflow");
    }
    Ok(dates)
}

/// Count keyword occurrences per calendar day for one region.
///
/// Every day in `[from, to]` gets a row; days without documents are all
/// zero. Keywords must be lexicon entries, otherwise the segmenter could
/// never produce them and the count would silently be zero.
pub fn daily_keyword_counts(
    corpus: &Corpus,
    lex: &Lexicon,
    keywords: &[String],
    region: &str,
    from: NaiveDate,
    to: NaiveDate,
) -> Result<KeywordCountMatrix> {
    for kw in keywords {
        if !lex.contains(kw) {
            return Err(Error::Argument(format!(
                "keyword '{kw}' is not a lexicon entry"
            )));
        }
    }
    let dates = date_range(from, to)?;
    let day_index: BTreeMap<NaiveDate, usize> =
        dates.iter().copied().enumerate().map(|(i, d)| (d, i)).collect();
    let kw_index: BTreeMap<&str, usize> =
        keywords.iter().enumerate().map(|(j, k)| (k.as_str(), j)).collect();
    let mut counts = vec![vec![0u64; keywords.len()]; dates.len()];
    for doc in corpus.documents() {
        if doc.region != region {
            continue;
        }
        let Some(&row) = day_index.get(&doc.date) else {
            continue;
        };
        for token in segment(&doc.title, lex).into_iter().chain(segment(&doc.body, lex)) {
            if let Some(&col) = kw_index.get(token.as_str()) {
                counts[row][col] += 1;
            }
        }
    }
    Ok(KeywordCountMatrix {
        region: region.to_string(),
        dates,
        keywords: keywords.to_vec(),
        counts,
    })
}

/// Differentiation coefficients for the keywords of a count matrix.
///
/// Keywords whose column sums to zero are excluded (their coefficient is
/// undefined); their indices are reported so callers can warn.
#[derive(Debug, Clone, PartialEq)]
pub struct Differentiation {
    /// Column indices of the retained keywords, in matrix order.
    pub kept: Vec<usize>,
    /// Coefficient per retained keyword, aligned with `kept`.
    pub d: Vec<f64>,
    /// Column indices of zero-count keywords excluded from the output.
    pub excluded: Vec<usize>,
}

/// Compute `d[j] = 1 + (1/ln n) Σ_i p[i][j] ln p[i][j]` per keyword.
pub fn differentiation_coefficients(m: &KeywordCountMatrix) -> Result<Differentiation> {
    let n = m.n_days();
    if n < 2 {
        return Err(Error::Argument(format!(
            "differentiation needs at least 2 days, got {n} ({})",
            m.region()
        )));
    }
    let ln_n = (n as f64).ln();
    let mut kept = Vec::new();
    let mut d = Vec::new();
    let mut excluded = Vec::new();
    for j in 0..m.keywords().len() {
        let col_sum: u64 = m.counts().iter().map(|row| row[j]).sum();
        if col_sum == 0 {
            log::warn!(
                "keyword '{}' never occurs in the window; excluded from weighting",
                m.keywords()[j]
            );
            excluded.push(j);
            continue;
        }
        let total = col_sum as f64;
        let mut entropy = 0.0;
        for row in m.counts() {
            let c = row[j];
            if c > 0 {
                let p = c as f64 / total;
                entropy += p * p.ln();
            }
        }
        kept.push(j);
        d.push(1.0 + entropy / ln_n);
    }
    Ok(Differentiation { kept, d, excluded })
}

/// Normalize differentiation coefficients into weights `w[j] = d[j] / Σ d`.
pub fn entropy_weights(d: &[f64]) -> Result<Vec<f64>> {
    let sum: f64 = d.iter().sum();
    if d.is_empty() || sum <= 0.0 {
        return Err(Error::Degenerate(
            "all differentiation coefficients are zero; dictionary carries no signal".into(),
        ));
    }
    Ok(d.iter().map(|&x| x / sum).collect())
}

/// A dictionary keyword with its aspect tag, differentiation coefficient
/// and entropy weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedKeyword {
    pub token: String,
    pub type_tag: TypeTag,
    pub d: f64,
    pub weight: f64,
}

/// The weighted keyword dictionary. Weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct KeywordDictionary {
    entries: Vec<WeightedKeyword>,
}

impl KeywordDictionary {
    pub fn new(entries: Vec<WeightedKeyword>) -> Result<Self> {
        let sum: f64 = entries.iter().map(|e| e.weight).sum();
        if entries.iter().any(|e| e.weight < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "dictionary weights must be non-negative and sum to 1, got {sum}"
            )));
        }
        Ok(KeywordDictionary { entries })
    }

    pub fn entries(&self) -> &[WeightedKeyword] {
        &self.entries
    }

    pub fn tokens(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.token.clone()).collect()
    }
}

/// Build the weighted dictionary from a count matrix and keyword specs.
///
/// The spec order must match the matrix keyword order. Returns the
/// dictionary plus the tokens that were excluded for never occurring.
pub fn build_dictionary(
    m: &KeywordCountMatrix,
    specs: &[KeywordSpec],
) -> Result<(KeywordDictionary, Vec<String>)> {
    if specs.len() != m.keywords().len()
        || specs.iter().zip(m.keywords()).any(|(s, k)| s.token != *k)
    {
        return Err(Error::Argument(
            "keyword specs do not match the count matrix columns".into(),
        ));
    }
    let diff = differentiation_coefficients(m)?;
    let weights = entropy_weights(&diff.d)?;
    let entries = diff
        .kept
        .iter()
        .zip(diff.d.iter())
        .zip(weights.iter())
        .map(|((&j, &d), &w)| WeightedKeyword {
            token: specs[j].token.clone(),
            type_tag: specs[j].type_tag,
            d,
            weight: w,
        })
        .collect();
    let excluded = diff.excluded.iter().map(|&j| specs[j].token.clone()).collect();
    Ok((KeywordDictionary::new(entries)?, excluded))
}

/// Daily policy effectiveness index values for one region.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSeries {
    pub region: String,
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

/// Daily index: `value[i] = Σ_j w[j] · count[i][j]` over dictionary keywords.
pub fn effectiveness_index(
    m: &KeywordCountMatrix,
    dict: &KeywordDictionary,
) -> Result<IndexSeries> {
    let kw_index: BTreeMap<&str, usize> =
        m.keywords().iter().enumerate().map(|(j, k)| (k.as_str(), j)).collect();
    let mut cols = Vec::with_capacity(dict.entries().len());
    for e in dict.entries() {
        match kw_index.get(e.token.as_str()) {
            Some(&j) => cols.push((j, e.weight)),
            None => {
                return Err(Error::Argument(format!(
                    "dictionary keyword '{}' missing from the count matrix",
                    e.token
                )))
            }
        }
    }
    let values = m
        .counts()
        .iter()
        .map(|row| cols.iter().map(|&(j, w)| w * row[j] as f64).sum())
        .collect();
    Ok(IndexSeries {
        region: m.region().to_string(),
        dates: m.dates().to_vec(),
        values,
    })
}
