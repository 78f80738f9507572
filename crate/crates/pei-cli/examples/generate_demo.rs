//! Regenerate the demo dataset under `demo/`.
//!
//! The corpus is synthetic but structured like the real thing: eight
//! regions publish documents daily over 2020-01-01..2020-04-16, keyword
//! usage bursts at region-specific times with volatility clustering, the
//! case-count series peaks in mid-February, and the market series skips
//! weekends plus an extended new-year closure.
//!
//! Run with `cargo run -p pei-cli --example generate_demo` from the
//! repository root; output is deterministic.

use std::fmt::Write as _;
use std::path::Path;

use chrono::{Datelike, NaiveDate, Weekday};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use pei_core::corpus::{save_corpus, Corpus, Document};

const SEED: u64 = 20200416;
const FROM: &str = "2020-01-01";
const TO: &str = "2020-04-16";

/// Keywords by type, reduced to unique tokens (the published list repeats
/// `company`, `security`, `highway` and `food`, and leaves `farming`
/// untyped; see the comments written into the dictionary file).
const KEYWORDS_A: &[&str] = &[
    "nursery", "infant", "children", "transport", "vehicle", "access", "highway", "in-out",
    "shop", "supermarket", "up", "illegal", "inspection",
];
const KEYWORDS_B: &[&str] = &[
    "civil affairs", "mission", "rights", "administrative", "report", "underreport", "omission",
    "complaint", "processing", "responsibility", "test", "performance",
];
const KEYWORDS_C: &[&str] = &[
    "science", "Stocks", "institutional", "company", "enterprise", "business", "management",
    "taxes", "structural", "greening", "farmers", "wood", "ecology", "pollution", "cycle",
    "watersave", "sewage", "agricultural", "mechanized", "farmland", "pesticides", "fertilizer",
    "employment", "employer", "worker", "vocational", "secondary", "education", "graduation",
    "recruitment",
];
const KEYWORDS_D: &[&str] = &[
    "meadow", "fire", "fight", "sandstorm", "weather", "disaster", "emergency", "check",
    "traffic", "party", "branch", "political", "grain-oil", "food",
];
const KEYWORDS_E: &[&str] = &[
    "electricity", "grid", "power", "toll road", "tolls", "rent", "rent free", "subsidies",
    "loan", "special", "credit", "financing", "liquidity", "cost", "platform", "security",
    "bank", "farming", "sanctuary", "catering", "store", "return-work", "the-view", "open",
    "online", "posts",
];

const FILLERS: &[&str] = &[
    "notice", "circular", "province", "government", "office", "general", "implement",
    "strengthen", "promote", "measure", "plan", "development", "city", "county", "department",
    "bureau", "committee", "meeting", "opinion", "regulation", "decision", "announcement",
    "public", "people", "service", "period", "prevention", "control", "epidemic", "virus",
    "outbreak", "quarantine", "hospital", "medical", "health", "patient", "community",
    "support", "mask", "temperature", "isolation", "situation", "response", "requirement",
    "further", "relevant", "unit", "level", "carry", "spirit",
];

const STOPWORDS: &[&str] = &["the", "of", "and", "to", "for", "on", "by", "with", "in", "at"];

struct Region {
    name: &'static str,
    /// Day index of the publication burst.
    peak: f64,
    /// Burst amplitude added to the keyword share.
    amplitude: f64,
    /// Extra documents per day at the burst peak.
    doc_boost: f64,
    /// Preferred keyword types, as weights over A..E.
    type_weights: [f64; 5],
}

const REGIONS: &[Region] = &[
    Region { name: "Central", peak: 24.0, amplitude: 0.45, doc_boost: 2.5, type_weights: [1.0, 1.0, 1.0, 1.0, 1.0] },
    Region { name: "Hubei", peak: 40.0, amplitude: 0.55, doc_boost: 3.5, type_weights: [2.5, 1.0, 0.5, 2.0, 0.8] },
    Region { name: "Guangdong", peak: 31.0, amplitude: 0.40, doc_boost: 2.0, type_weights: [1.5, 0.8, 1.2, 1.0, 1.8] },
    Region { name: "Hainan", peak: 32.0, amplitude: 0.35, doc_boost: 1.5, type_weights: [1.2, 0.7, 1.0, 1.0, 2.0] },
    Region { name: "Beijing", peak: 35.0, amplitude: 0.30, doc_boost: 1.5, type_weights: [1.5, 1.5, 1.0, 1.2, 1.0] },
    Region { name: "Heilongjiang", peak: 45.0, amplitude: 0.25, doc_boost: 1.0, type_weights: [1.0, 1.0, 1.3, 1.5, 0.8] },
    Region { name: "Shanghai", peak: 33.0, amplitude: 0.35, doc_boost: 1.8, type_weights: [1.0, 1.0, 1.5, 0.8, 1.8] },
    Region { name: "Sichuan", peak: 44.0, amplitude: 0.28, doc_boost: 1.2, type_weights: [1.2, 0.9, 1.4, 1.3, 1.0] },
];

fn keyword_types() -> [&'static [&'static str]; 5] {
    [KEYWORDS_A, KEYWORDS_B, KEYWORDS_C, KEYWORDS_D, KEYWORDS_E]
}

fn main() {
    let out = Path::new("demo");
    std::fs::create_dir_all(out).expect("create demo dir");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    write_dictionary(&out.join("dictionary.csv"));
    write_lexicon(&out.join("lexicon.txt"));
    write_stopwords(&out.join("stopwords.txt"));
    write_groups(&out.join("groups.csv"));
    write_corpus(&out.join("corpus.jsonl"), &mut rng);
    write_covid(&out.join("covid.csv"), &mut rng);
    write_stock(&out.join("stock.csv"), &mut rng);
    write_config(&out.join("report.conf"));
    println!("demo dataset written to {}", out.display());
}

fn write_dictionary(path: &Path) {
    let mut s = String::new();
    s.push_str("# COVID-19 policy keyword dictionary, types A-E.\n");
    s.push_str("# The published 99-cell list repeats company(C), security(E), highway(A/D)\n");
    s.push_str("# and food(D/E); each token is kept once under its first type. The untyped\n");
    s.push_str("# cell `farming` sits among E entries and is tagged E. 95 unique keywords.\n");
    s.push_str("keyword,type\n");
    for (tag, words) in ["A", "B", "C", "D", "E"].iter().zip(keyword_types()) {
        for w in words {
            let quoted = if w.contains(',') { format!("\"{w}\"") } else { w.to_string() };
            writeln!(s, "{quoted},{tag}").unwrap();
        }
    }
    std::fs::write(path, s).expect("write dictionary");
}

fn write_lexicon(path: &Path) {
    let mut entries: Vec<&str> = Vec::new();
    for words in keyword_types() {
        entries.extend(words);
    }
    entries.extend(FILLERS);
    entries.extend(STOPWORDS);
    entries.sort_unstable();
    entries.dedup();
    std::fs::write(path, entries.join("\n") + "\n").expect("write lexicon");
}

fn write_stopwords(path: &Path) {
    std::fs::write(path, STOPWORDS.join("\n") + "\n").expect("write stopwords");
}

fn write_groups(path: &Path) {
    let rows = [
        ("Central", "Central"),
        ("Hubei", "Hubei"),
        ("North", "Beijing"),
        ("North", "Heilongjiang"),
        ("South", "Guangdong"),
        ("South", "Hainan"),
        ("East", "Shanghai"),
        ("West", "Sichuan"),
    ];
    let mut s = String::from("group,region\n");
    for (g, r) in rows {
        writeln!(s, "{g},{r}").unwrap();
    }
    std::fs::write(path, s).expect("write groups");
}

fn dates() -> Vec<NaiveDate> {
    let from: NaiveDate = FROM.parse().unwrap();
    let to: NaiveDate = TO.parse().unwrap();
    let mut out = Vec::new();
    let mut d = from;
    while d <= to {
        out.push(d);
        d = d.succ_opt().unwrap();
    }
    out
}

fn pick<'a>(rng: &mut ChaCha8Rng, items: &[&'a str]) -> &'a str {
    items[rng.random_range(0..items.len())]
}

fn pick_weighted(rng: &mut ChaCha8Rng, weights: &[f64; 5]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut target = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        target -= w;
        if target <= 0.0 {
            return i;
        }
    }
    4
}

fn write_corpus(path: &Path, rng: &mut ChaCha8Rng) {
    let days = dates();
    let types = keyword_types();
    let mut docs = Vec::new();
    for region in REGIONS {
        // Heteroskedastic daily disturbance so counts show volatility
        // clustering, which the GARCH stage expects to find.
        let mut eps: f64 = 0.0;
        let mut sigma2: f64 = 0.01;
        for (t, date) in days.iter().enumerate() {
            sigma2 = 0.004 + 0.25 * eps * eps + 0.65 * sigma2;
            let z: f64 = rng.sample(StandardNormal);
            eps = sigma2.sqrt() * z;
            let burst = region.amplitude
                * (-((t as f64 - region.peak).powi(2)) / (2.0 * 12.0f64.powi(2))).exp();
            let keyword_share = (0.12 + burst + eps).clamp(0.02, 0.85);

            let doc_intensity = 1.0 + region.doc_boost * burst * 2.0;
            let n_docs = 1 + rng.random_range(0..=doc_intensity.round() as usize);
            for _ in 0..n_docs {
                let title = gen_tokens(rng, 4, region, keyword_share * 0.7, &types, true);
                let body_len = rng.random_range(25..=60);
                let body = gen_tokens(rng, body_len, region, keyword_share, &types, false);
                docs.push(Document {
                    region: region.name.to_string(),
                    date: *date,
                    title,
                    body,
                });
            }
        }
    }
    let corpus = Corpus::from_documents(docs).expect("valid corpus");
    save_corpus(&corpus, path).expect("write corpus");
}

fn gen_tokens(
    rng: &mut ChaCha8Rng,
    len: usize,
    region: &Region,
    keyword_share: f64,
    types: &[&'static [&'static str]; 5],
    title: bool,
) -> String {
    let mut words = Vec::with_capacity(len + 2);
    if title {
        words.push("notice");
        words.push(pick(rng, STOPWORDS));
    }
    for _ in 0..len {
        if rng.random::<f64>() < keyword_share {
            let ty = pick_weighted(rng, &region.type_weights);
            words.push(pick(rng, types[ty]));
        } else if rng.random::<f64>() < 0.25 {
            words.push(pick(rng, STOPWORDS));
        } else {
            words.push(pick(rng, FILLERS));
        }
    }
    words.join(" ")
}

fn write_covid(path: &Path, rng: &mut ChaCha8Rng) {
    let mut s = String::from("date,value\n");
    for (t, date) in dates().iter().enumerate() {
        let td = t as f64;
        let hump = 8000.0 * (-((td - 43.0).powi(2)) / (2.0 * 14.0f64.powi(2))).exp();
        let spike = if t == 43 { 6000.0 } else { 0.0 };
        let noise: f64 = rng.sample::<f64, _>(StandardNormal) * (30.0 + hump * 0.15);
        let value = (hump + spike + noise).max(0.0).round();
        writeln!(s, "{date},{value}").unwrap();
    }
    std::fs::write(path, s).expect("write covid series");
}

fn write_stock(path: &Path, rng: &mut ChaCha8Rng) {
    // New-year closure mirroring early 2020; the market reopens with a jolt.
    let closure_from: NaiveDate = "2020-01-24".parse().unwrap();
    let closure_to: NaiveDate = "2020-02-02".parse().unwrap();
    let reopen: NaiveDate = "2020-02-03".parse().unwrap();
    let mut s = String::from("date,value\n");
    let mut prev: f64 = 0.0;
    let mut eps: f64 = 0.0;
    let mut sigma2: f64 = 0.5;
    for date in dates() {
        let weekend = matches!(date.weekday(), Weekday::Sat | Weekday::Sun);
        if weekend || (date >= closure_from && date <= closure_to) {
            continue;
        }
        sigma2 = 0.05 + 0.15 * eps * eps + 0.75 * sigma2;
        let z: f64 = rng.sample(StandardNormal);
        eps = sigma2.sqrt() * z;
        let mut value = 0.1 * prev + eps;
        if date == reopen {
            value -= 7.0;
        }
        prev = value;
        writeln!(s, "{date},{value:.4}").unwrap();
    }
    std::fs::write(path, s).expect("write stock series");
}

fn write_config(path: &Path) {
    let text = format!(
        "# Demo pipeline configuration. Paths are relative to this file.\n\
corpus = corpus.jsonl\n\
lexicon = lexicon.txt\n\
stopwords = stopwords.txt\n\
dictionary = dictionary.csv\n\
group_map = groups.csv\n\
covid_series = covid.csv\n\
stock_series = stock.csv\n\
window_from = {FROM}\n\
window_to = {TO}\n\
ccf_max_lag = 14\n\
lda_topics = 5\n\
lda_iterations = 200\n\
lda_seed = 42\n\
alignment_policy = zero_fill\n\
central_region = Central\n"
    );
    std::fs::write(path, text).expect("write config");
}
