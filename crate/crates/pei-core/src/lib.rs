//! Core library for building a daily policy effectiveness index from a
//! dated, region-tagged document corpus and analysing its joint volatility
//! dynamics with other daily series.
//!
//! The pipeline runs in two halves:
//!
//! 1. **Text → index.** Documents are segmented with a lexicon-driven
//!    forward-maximum-match tokenizer ([`textproc`]), keyword occurrences are
//!    counted per day ([`index`]), keywords are weighted by the entropy
//!    method, and the weighted daily counts form one index series per
//!    region. [`topics`] provides an LDA topic model (collapsed Gibbs) used
//!    to curate the keyword dictionary.
//! 2. **Series analysis.** [`diagnostics`] covers ACF, Ljung–Box,
//!    augmented Dickey–Fuller tests and lagged cross-correlation with shape
//!    classification; [`volatility`] fits AR(1)+GARCH(1,1) per series and a
//!    two-stage DCC(1,1) on the standardized residuals, producing conditional
//!    covariance paths and grouped volatility series.
//!
//! [`pipeline`] wires both halves into a deterministic report run driven by a
//! flat key-value config file.

pub mod corpus;
pub mod diagnostics;
pub mod error;
pub mod index;
pub mod optim;
pub mod pipeline;
pub mod textproc;
pub mod topics;
pub mod volatility;

pub use corpus::{filter_corpus, load_corpus, save_corpus, Corpus, Document};
pub use error::{Error, Result};
pub use index::{IndexSeries, KeywordDictionary};
pub use textproc::{Lexicon, TermCounts};
pub use topics::TopicModel;
pub use volatility::{DccFit, GarchFit};
