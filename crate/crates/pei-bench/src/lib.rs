//! Benchmark-only crate; see `benches/core_ops.rs`.
//!
//! Shared input builders live here so the bench targets stay small.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Synthetic text of space-separated tokens drawn from a fixed vocabulary.
pub fn synthetic_text(tokens: usize, seed: u64) -> String {
    const VOCAB: &[&str] = &[
        "loan", "rescue", "emergency", "notice", "province", "government", "work", "credit",
        "subsidies", "inspection", "transport", "education", "the", "of", "to",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for i in 0..tokens {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(VOCAB[rng.random_range(0..VOCAB.len())]);
    }
    out
}

/// Random daily count columns for the weighting benchmarks.
pub fn random_counts(days: usize, keywords: usize, seed: u64) -> Vec<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..days)
        .map(|_| (0..keywords).map(|_| rng.random_range(0..25)).collect())
        .collect()
}
