//! LDA topic model fitted by collapsed Gibbs sampling.
//!
//! One token-level sweep per iteration; the full conditional for token
//! assignment is proportional to `(n_dk + alpha) * (n_kw + beta) / (n_k +
//! V*beta)`. A single final sample is read out: `phi` and `theta` come from
//! the last assignment counts with Dirichlet smoothing. Runs are
//! bit-reproducible for a given seed.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Hyperparameters and run settings for an LDA fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaConfig {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl LdaConfig {
    /// Standard Gibbs-LDA defaults: `alpha = 50/K`, `beta = 0.01`.
    pub fn with_topics(k: usize) -> Self {
        LdaConfig {
            k,
            alpha: 50.0 / k.max(1) as f64,
            beta: 0.01,
            iterations: 1000,
            seed: 0,
        }
    }
}

impl Default for LdaConfig {
    /// Five topics, mirroring the five keyword aspect types A–E.
    fn default() -> Self {
        LdaConfig::with_topics(5)
    }
}

/// A fitted topic model.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    pub k: usize,
    /// Sorted vocabulary; `phi` columns follow this order.
    pub vocab: Vec<String>,
    /// `phi[k][w]`: topic-word probabilities, each row sums to 1.
    pub phi: Vec<Vec<f64>>,
    /// `theta[d][k]`: document-topic probabilities for each kept document.
    pub theta: Vec<Vec<f64>>,
    /// Indices into the input document list for the rows of `theta`;
    /// documents empty after tokenization are skipped.
    pub kept_docs: Vec<usize>,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
    pub iterations: usize,
}

/// Fit LDA over tokenized documents by collapsed Gibbs sampling.
///
/// Documents that are empty after tokenization are skipped with a warning.
/// Identical inputs and seed produce an identical model.
pub fn fit_lda(docs: &[Vec<String>], cfg: &LdaConfig) -> Result<TopicModel> {
    if cfg.k < 1 {
        return Err(Error::Argument("topic count must be at least 1".into()));
    }
    if cfg.iterations < 1 {
        return Err(Error::Argument("iteration count must be at least 1".into()));
    }
    let mut kept_docs = Vec::new();
    for (i, doc) in docs.iter().enumerate() {
        if doc.is_empty() {
            log::warn!("document {i} is empty after tokenization; skipped");
        } else {
            kept_docs.push(i);
        }
    }
    if kept_docs.is_empty() {
        return Err(Error::Argument("no non-empty documents to fit".into()));
    }

    // Sorted vocabulary gives deterministic word ids.
    let mut vocab_map = BTreeMap::new();
    for &d in &kept_docs {
        for tok in &docs[d] {
            vocab_map.entry(tok.clone()).or_insert(0usize);
        }
    }
    let vocab: Vec<String> = vocab_map.keys().cloned().collect();
    for (id, (_, v)) in vocab_map.iter_mut().enumerate() {
        *v = id;
    }
    let v_size = vocab.len();
    let k = cfg.k;

    let word_ids: Vec<Vec<usize>> = kept_docs
        .iter()
        .map(|&d| docs[d].iter().map(|t| vocab_map[t]).collect())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut z: Vec<Vec<usize>> = Vec::with_capacity(word_ids.len());
    let mut n_dk = vec![vec![0u32; k]; word_ids.len()];
    let mut n_kw = vec![vec![0u32; v_size]; k];
    let mut n_k = vec![0u32; k];
    for (d, words) in word_ids.iter().enumerate() {
        let mut zd = Vec::with_capacity(words.len());
        for &w in words {
            let topic = rng.random_range(0..k);
            zd.push(topic);
            n_dk[d][topic] += 1;
            n_kw[topic][w] += 1;
            n_k[topic] += 1;
        }
        z.push(zd);
    }

    let beta_v = cfg.beta * v_size as f64;
    let mut weights = vec![0.0f64; k];
    for _ in 0..cfg.iterations {
        for (d, words) in word_ids.iter().enumerate() {
            for (i, &w) in words.iter().enumerate() {
                let old = z[d][i];
                n_dk[d][old] -= 1;
                n_kw[old][w] -= 1;
                n_k[old] -= 1;

                let mut total = 0.0;
                for t in 0..k {
                    let p = (n_dk[d][t] as f64 + cfg.alpha)
                        * (n_kw[t][w] as f64 + cfg.beta)
                        / (n_k[t] as f64 + beta_v);
                    weights[t] = p;
                    total += p;
                }
                let mut target = rng.random::<f64>() * total;
                let mut new = k - 1;
                for (t, &p) in weights.iter().enumerate() {
                    target -= p;
                    if target <= 0.0 {
                        new = t;
                        break;
                    }
                }

                z[d][i] = new;
                n_dk[d][new] += 1;
                n_kw[new][w] += 1;
                n_k[new] += 1;
            }
        }
    }

    let phi = (0..k)
        .map(|t| {
            let denom = n_k[t] as f64 + beta_v;
            (0..v_size)
                .map(|w| (n_kw[t][w] as f64 + cfg.beta) / denom)
                .collect()
        })
        .collect();
    let theta = word_ids
        .iter()
        .enumerate()
        .map(|(d, words)| {
            let denom = words.len() as f64 + cfg.alpha * k as f64;
            (0..k).map(|t| (n_dk[d][t] as f64 + cfg.alpha) / denom).collect()
        })
        .collect();

    Ok(TopicModel {
        k,
        vocab,
        phi,
        theta,
        kept_docs,
        alpha: cfg.alpha,
        beta: cfg.beta,
        seed: cfg.seed,
        iterations: cfg.iterations,
    })
}

/// The `n` heaviest words of a topic as `(weight, token)`, weight-descending
/// with lexicographic tie-break.
pub fn top_words(model: &TopicModel, topic: usize, n: usize) -> Result<Vec<(f64, String)>> {
    if topic >= model.k {
        return Err(Error::Argument(format!(
            "topic {topic} out of range (K = {})",
            model.k
        )));
    }
    let mut items: Vec<(f64, String)> = model.phi[topic]
        .iter()
        .zip(&model.vocab)
        .map(|(&w, t)| (w, t.clone()))
        .collect();
    items.sort_by(|a, b| {
        b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then_with(|| a.1.cmp(&b.1))
    });
    items.truncate(n);
    Ok(items)
}

/// Render one topic as `topic_i: w1*token1+w2*token2+…`.
pub fn format_topic_line(model: &TopicModel, topic: usize, n: usize) -> Result<String> {
    let words = top_words(model, topic, n)?;
    let terms: Vec<String> =
        words.iter().map(|(w, t)| format!("{w:.3}*{t}")).collect();
    Ok(format!("topic_{topic}: {}", terms.join("+")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs_of(words: &[&[&str]]) -> Vec<Vec<String>> {
        words
            .iter()
            .map(|d| d.iter().map(|w| w.to_string()).collect())
            .collect()
    }

    #[test]
    fn single_topic_reduces_to_smoothed_frequency() {
        let docs = docs_of(&[&["a", "a", "b"], &["a", "b"]]);
        let cfg = LdaConfig { k: 1, alpha: 1.0, beta: 0.5, iterations: 3, seed: 7 };
        let m = fit_lda(&docs, &cfg).unwrap();
        // count(a)=3, count(b)=2, total=5, V=2
        let denom = 5.0 + 2.0 * 0.5;
        assert!((m.phi[0][0] - (3.0 + 0.5) / denom).abs() < 1e-12);
        assert!((m.phi[0][1] - (2.0 + 0.5) / denom).abs() < 1e-12);
    }

    #[test]
    fn rows_are_stochastic() {
        let docs = docs_of(&[&["a", "b", "c"], &["c", "d"], &["a", "d", "d"]]);
        let cfg = LdaConfig { k: 3, alpha: 0.5, beta: 0.01, iterations: 20, seed: 1 };
        let m = fit_lda(&docs, &cfg).unwrap();
        for row in &m.phi {
            let s: f64 = row.iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
            assert!(row.iter().all(|&p| p > 0.0));
        }
        for row in &m.theta {
            let s: f64 = row.iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
            assert!(row.iter().all(|&p| p > 0.0));
        }
    }

    #[test]
    fn same_seed_same_model() {
        let docs = docs_of(&[&["a", "b", "c"], &["c", "d"], &["a", "d", "d"]]);
        let cfg = LdaConfig { k: 2, alpha: 1.0, beta: 0.1, iterations: 50, seed: 42 };
        let m1 = fit_lda(&docs, &cfg).unwrap();
        let m2 = fit_lda(&docs, &cfg).unwrap();
        assert_eq!(m1, m2);
    }

    #[test]
    fn different_seeds_usually_differ() {
        let docs = docs_of(&[&["a", "b", "c", "d"], &["c", "d", "a"], &["b", "b", "d"]]);
        let cfg1 = LdaConfig { k: 2, alpha: 1.0, beta: 0.1, iterations: 5, seed: 1 };
        let cfg2 = LdaConfig { seed: 2, ..cfg1.clone() };
        let m1 = fit_lda(&docs, &cfg1).unwrap();
        let m2 = fit_lda(&docs, &cfg2).unwrap();
        assert_ne!(m1.phi, m2.phi);
    }

    #[test]
    fn empty_documents_are_skipped() {
        let docs = docs_of(&[&["a", "b"], &[], &["b", "c"]]);
        let cfg = LdaConfig { k: 1, alpha: 1.0, beta: 0.1, iterations: 2, seed: 0 };
        let m = fit_lda(&docs, &cfg).unwrap();
        assert_eq!(m.kept_docs, vec![0, 2]);
        assert_eq!(m.theta.len(), 2);
    }

    #[test]
    fn invalid_arguments_rejected() {
        let docs = docs_of(&[&["a"]]);
        let bad_k = LdaConfig { k: 0, alpha: 1.0, beta: 0.1, iterations: 1, seed: 0 };
        assert!(matches!(fit_lda(&docs, &bad_k), Err(Error::Argument(_))));
        let cfg = LdaConfig { k: 1, alpha: 1.0, beta: 0.1, iterations: 1, seed: 0 };
        assert!(matches!(fit_lda(&[], &cfg), Err(Error::Argument(_))));
        let all_empty = docs_of(&[&[]]);
        assert!(matches!(fit_lda(&all_empty, &cfg), Err(Error::Argument(_))));
    }

    #[test]
    fn top_words_degeneracy_and_bounds() {
        // K=1, counts a:3 b:1, beta -> 0 limit approximated with tiny beta.
        let docs = docs_of(&[&["a", "a", "a", "b"]]);
        let cfg = LdaConfig { k: 1, alpha: 1.0, beta: 1e-12, iterations: 1, seed: 0 };
        let m = fit_lda(&docs, &cfg).unwrap();
        let words = top_words(&m, 0, 2).unwrap();
        assert_eq!(words[0].1, "a");
        assert!((words[0].0 - 0.75).abs() < 1e-9);
        assert!((words[1].0 - 0.25).abs() < 1e-9);
        assert!(top_words(&m, 0, 0).unwrap().is_empty());
        assert!(matches!(top_words(&m, 1, 3), Err(Error::Argument(_))));
    }

    #[test]
    fn separated_topic_concentrates_above_uniform_weight() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let cluster_a = ["a", "b", "c"];
        let cluster_b = ["x", "y", "z"];
        let mut docs: Vec<Vec<String>> = Vec::new();
        for cluster in [&cluster_a, &cluster_b] {
            for _ in 0..50 {
                docs.push((0..8).map(|_| cluster[rng.random_range(0..3)].to_string()).collect());
            }
        }
        let cfg = LdaConfig { k: 2, alpha: 25.0, beta: 0.01, iterations: 500, seed: 1 };
        let m = fit_lda(&docs, &cfg).unwrap();
        let v = m.vocab.len() as f64;
        let topic_with_a = (0..2)
            .find(|&k| top_words(&m, k, 3).unwrap().iter().any(|(_, t)| t == "a"))
            .expect("one topic holds cluster a");
        let (top_weight, _) = top_words(&m, topic_with_a, 1).unwrap()[0].clone();
        assert!(top_weight > 1.0 / v, "top weight {top_weight} vs uniform {}", 1.0 / v);
    }

    #[test]
    fn topic_line_format() {
        let docs = docs_of(&[&["a", "a", "a", "b"]]);
        let cfg = LdaConfig { k: 1, alpha: 1.0, beta: 1e-12, iterations: 1, seed: 0 };
        let m = fit_lda(&docs, &cfg).unwrap();
        let line = format_topic_line(&m, 0, 2).unwrap();
        assert_eq!(line, "topic_0: 0.750*a+0.250*b");
    }
}
