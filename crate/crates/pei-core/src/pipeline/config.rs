//! Flat key-value pipeline configuration.
//!
//! One `key = value` pair per line, `#` starts a comment. Relative paths
//! are resolved against the config file's directory, so a config travels
//! with its data.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::pipeline::align::AlignmentPolicy;
use crate::topics::LdaConfig;

/// Everything a report run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub corpus_path: PathBuf,
    pub lexicon_path: PathBuf,
    pub stopword_path: Option<PathBuf>,
    pub dictionary_path: PathBuf,
    pub group_map_path: PathBuf,
    pub covid_path: PathBuf,
    pub stock_path: PathBuf,
    pub window: (NaiveDate, NaiveDate),
    pub ccf_max_lag: usize,
    pub lda: LdaConfig,
    pub alignment_policy: AlignmentPolicy,
    /// Region whose index anchors the cross-correlation sweep and the
    /// three-series volatility model.
    pub central_region: String,
}

impl PipelineConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_str_with_base(&text, base)
    }

    pub fn from_str_with_base(text: &str, base: &Path) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Validation(format!("config line {}: expected 'key = value'", idx + 1))
            })?;
            kv.insert(key.trim().to_string(), value.trim().to_string());
        }

        let require = |key: &str| -> Result<String> {
            kv.get(key)
                .cloned()
                .ok_or_else(|| Error::Validation(format!("config is missing '{key}'")))
        };
        let resolve = |value: String| -> PathBuf {
            let p = PathBuf::from(value);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        let parse_date = |key: &str| -> Result<NaiveDate> {
            require(key)?.parse().map_err(|e| {
                Error::Validation(format!("config '{key}' is not a date (YYYY-MM-DD): {e}"))
            })
        };
        fn parse_num<T: std::str::FromStr>(kv: &BTreeMap<String, String>, key: &str, default: T) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            match kv.get(key) {
                Some(v) => v
                    .parse()
                    .map_err(|e| Error::Validation(format!("config '{key}': {e}"))),
                None => Ok(default),
            }
        }

        let k: usize = parse_num(&kv, "lda_topics", 5)?;
        let lda = LdaConfig {
            k,
            alpha: parse_num(&kv, "lda_alpha", 50.0 / k.max(1) as f64)?,
            beta: parse_num(&kv, "lda_beta", 0.01)?,
            iterations: parse_num(&kv, "lda_iterations", 1000)?,
            seed: parse_num(&kv, "lda_seed", 0)?,
        };
        let cfg = PipelineConfig {
            corpus_path: resolve(require("corpus")?),
            lexicon_path: resolve(require("lexicon")?),
            stopword_path: kv.get("stopwords").cloned().map(resolve),
            dictionary_path: resolve(require("dictionary")?),
            group_map_path: resolve(require("group_map")?),
            covid_path: resolve(require("covid_series")?),
            stock_path: resolve(require("stock_series")?),
            window: (parse_date("window_from")?, parse_date("window_to")?),
            ccf_max_lag: parse_num(&kv, "ccf_max_lag", 14)?,
            lda,
            alignment_policy: match kv.get("alignment_policy") {
                Some(v) => AlignmentPolicy::parse(v)?,
                None => AlignmentPolicy::ZeroFill,
            },
            central_region: kv
                .get("central_region")
                .cloned()
                .unwrap_or_else(|| "Central".to_string()),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window.0 > self.window.1 {
            return Err(Error::Validation(format!(
                "window start {} is after end {}",
                self.window.0, self.window.1
            )));
        }
        if self.ccf_max_lag < 8 {
            return Err(Error::Validation(format!(
                "ccf_max_lag must be at least 8 (the classifier pivots on lag 7), got {}",
                self.ccf_max_lag
            )));
        }
        if self.lda.k < 1 {
            return Err(Error::Validation("lda_topics must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
corpus = corpus.jsonl
lexicon = lexicon.txt
dictionary = dictionary.csv
group_map = groups.csv
covid_series = covid.csv
stock_series = stock.csv
window_from = 2020-01-01
window_to = 2020-04-16
";

    #[test]
    fn parses_minimal_config_with_defaults() {
        let cfg = PipelineConfig::from_str_with_base(MINIMAL, Path::new("/data")).unwrap();
        assert_eq!(cfg.corpus_path, Path::new("/data/corpus.jsonl"));
        assert_eq!(cfg.ccf_max_lag, 14);
        assert_eq!(cfg.lda.k, 5);
        assert!((cfg.lda.alpha - 10.0).abs() < 1e-12);
        assert_eq!(cfg.alignment_policy, AlignmentPolicy::ZeroFill);
        assert_eq!(cfg.central_region, "Central");
        assert!(cfg.stopword_path.is_none());
    }

    #[test]
    fn comments_and_overrides() {
        let text = format!(
            "{MINIMAL}\n# a comment\nccf_max_lag = 21 # trailing comment\nlda_seed = 7\nalignment_policy = drop_closed_days\ncentral_region = Beijing\n"
        );
        let cfg = PipelineConfig::from_str_with_base(&text, Path::new(".")).unwrap();
        assert_eq!(cfg.ccf_max_lag, 21);
        assert_eq!(cfg.lda.seed, 7);
        assert_eq!(cfg.alignment_policy, AlignmentPolicy::DropClosedDays);
        assert_eq!(cfg.central_region, "Beijing");
    }

    #[test]
    fn short_ccf_lag_rejected() {
        let text = format!("{MINIMAL}ccf_max_lag = 7\n");
        let err = PipelineConfig::from_str_with_base(&text, Path::new(".")).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn inverted_window_rejected() {
        let text = MINIMAL.replace("window_to = 2020-04-16", "window_to = 2019-01-01");
        assert!(PipelineConfig::from_str_with_base(&text, Path::new(".")).is_err());
    }

    #[test]
    fn missing_key_names_it() {
        let text = MINIMAL.replace("corpus = corpus.jsonl\n", "");
        let err = PipelineConfig::from_str_with_base(&text, Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("corpus"));
    }

    #[test]
    fn absolute_paths_kept_as_is() {
        let text = MINIMAL.replace("corpus = corpus.jsonl", "corpus = /abs/c.jsonl");
        let cfg = PipelineConfig::from_str_with_base(&text, Path::new("/data")).unwrap();
        assert_eq!(cfg.corpus_path, Path::new("/abs/c.jsonl"));
    }
}
