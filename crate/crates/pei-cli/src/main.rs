//! `pei` — build a daily policy effectiveness index from a document corpus
//! and analyze its joint volatility with external daily series.
//!
//! Exit codes: 0 success, 2 validation/argument error, 3 estimation error,
//! 4 I/O error.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use pei_core::diagnostics::{adf_test, ccf, AdfSpec};
use pei_core::error::{Error, Result};
use pei_core::index::{build_dictionary, daily_keyword_counts, load_keyword_specs};
use pei_core::pipeline::{align, io, run_pipeline, AlignmentPolicy, PipelineConfig};
use pei_core::textproc::{segment, term_frequencies, top_terms, Lexicon};
use pei_core::topics::{fit_lda, format_topic_line, LdaConfig};
use pei_core::volatility::{
    covariance_pairs, fit_ar1_garch11, fit_dcc, garch_param_table, group_volatility,
    param_table, GroupSpec,
};
use pei_core::{filter_corpus, load_corpus, save_corpus, Corpus};

#[derive(Parser)]
#[command(name = "pei", version, about = "Policy effectiveness index toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CorpusArgs {
    /// Corpus file (one JSON record per line).
    #[arg(long)]
    corpus: PathBuf,
    /// Lexicon file (one entry per line).
    #[arg(long)]
    lexicon: PathBuf,
    /// Optional stopword file (one entry per line).
    #[arg(long)]
    stopwords: Option<PathBuf>,
}

impl CorpusArgs {
    fn load(&self) -> Result<(Corpus, Lexicon)> {
        let corpus = load_corpus(&self.corpus)?;
        let lexicon = Lexicon::from_files(&self.lexicon, self.stopwords.as_deref())?;
        Ok((corpus, lexicon))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate a corpus; optionally filter and rewrite it.
    Ingest {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        from: Option<NaiveDate>,
        #[arg(long)]
        to: Option<NaiveDate>,
        /// Comma-separated region filter.
        #[arg(long, value_delimiter = ',')]
        regions: Option<Vec<String>>,
        /// Write the (filtered) corpus here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Term frequency table over the whole corpus.
    Freq {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Number of top terms to keep.
        #[arg(long, default_value_t = 50)]
        top: usize,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit an LDA topic model and print per-topic word lines.
    Lda {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Dirichlet document-topic prior; defaults to 50/K.
        #[arg(long)]
        alpha: Option<f64>,
        /// Dirichlet topic-word prior.
        #[arg(long, default_value_t = 0.01)]
        beta: f64,
        /// Words per topic line.
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Entropy weights for the dictionary keywords over a date window.
    Weights {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        dictionary: PathBuf,
        #[arg(long)]
        from: NaiveDate,
        #[arg(long)]
        to: NaiveDate,
        #[arg(long)]
        out: PathBuf,
    },
    /// Daily per-region index series (long and wide CSV).
    Index {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        dictionary: PathBuf,
        #[arg(long)]
        from: NaiveDate,
        #[arg(long)]
        to: NaiveDate,
        #[arg(long)]
        out_long: PathBuf,
        #[arg(long)]
        out_wide: PathBuf,
    },
    /// Augmented Dickey–Fuller unit-root test on a date,value series.
    Adf {
        #[arg(long)]
        series: PathBuf,
        /// Regression spec: nc, c or ct.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        lags: Option<usize>,
    },
    /// Lagged cross-correlation rho(k) = corr(y_t, x_{t-k}).
    Ccf {
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        x: PathBuf,
        #[arg(long, default_value_t = 14)]
        max_lag: usize,
        /// Output CSV (lag,rho); stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify each region's cross-correlation shape against a central
    /// region, from a wide index CSV.
    Classify {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, default_value = "Central")]
        central: String,
        #[arg(long, default_value_t = 14)]
        max_lag: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit AR(1)+GARCH(1,1) on a date,value series.
    Garch {
        #[arg(long)]
        series: PathBuf,
        /// Row label for the parameter table.
        #[arg(long, default_value = "series")]
        name: String,
        /// Parameter table CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a two-stage DCC(1,1)-GARCH over several date,value series.
    Dcc {
        /// Series CSVs, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        series: Vec<PathBuf>,
        /// Series names, comma separated; defaults to the file stems.
        #[arg(long, value_delimiter = ',')]
        names: Option<Vec<String>>,
        /// Calendar alignment: drop_closed_days or zero_fill.
        #[arg(long, default_value = "zero_fill")]
        policy: String,
        #[arg(long)]
        out_params: PathBuf,
        /// Covariance path CSV (date,pair,value).
        #[arg(long)]
        out_cov: Option<PathBuf>,
    },
    /// Grouped volatility from a wide index CSV and a group map.
    Groups {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        group_map: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the whole pipeline from a config file.
    Report {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Ingest { corpus, from, to, regions, out } => {
            let loaded = load_corpus(&corpus)?;
            let filtered = match (from, to) {
                (None, None) if regions.is_none() => loaded,
                _ => {
                    let lo = from.or(loaded.date_min()).unwrap_or(NaiveDate::MIN);
                    let hi = to.or(loaded.date_max()).unwrap_or(NaiveDate::MAX);
                    let set: Option<BTreeSet<String>> =
                        regions.map(|r| r.into_iter().collect());
                    filter_corpus(&loaded, lo, hi, set.as_ref())?
                }
            };
            println!("documents: {}", filtered.len());
            match (filtered.date_min(), filtered.date_max()) {
                (Some(a), Some(b)) => println!("window: {a}..{b}"),
                _ => println!("window: empty"),
            }
            let regions: Vec<String> = filtered.regions().into_iter().collect();
            println!("regions: {}", regions.join(","));
            if let Some(path) = out {
                save_corpus(&filtered, &path)?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Freq { corpus, top, out } => {
            let (corpus, lexicon) = corpus.load()?;
            let counts = top_terms(&term_frequencies(&corpus, &lexicon), top);
            match out {
                Some(path) => io::write_counts_csv(&path, ["token", "count"], &counts),
                None => {
                    let mut w = csv_stdout();
                    w.write_record(["token", "count"]).map_err(csv_err)?;
                    for (token, count) in &counts {
                        w.write_record([token.as_str(), &count.to_string()]).map_err(csv_err)?;
                    }
                    w.flush().map_err(|e| Error::Validation(e.to_string()))
                }
            }
        }
        Command::Lda { corpus, k, iters, seed, alpha, beta, top } => {
            let (corpus, lexicon) = corpus.load()?;
            let docs: Vec<Vec<String>> = corpus
                .documents()
                .iter()
                .map(|d| {
                    let mut toks = segment(&d.title, &lexicon);
                    toks.extend(segment(&d.body, &lexicon));
                    toks
                })
                .collect();
            let cfg = LdaConfig {
                k,
                alpha: alpha.unwrap_or(50.0 / k.max(1) as f64),
                beta,
                iterations: iters,
                seed,
            };
            let model = fit_lda(&docs, &cfg)?;
            for topic in 0..model.k {
                println!("{}", format_topic_line(&model, topic, top)?);
            }
            Ok(())
        }
        Command::Weights { corpus, dictionary, from, to, out } => {
            let (corpus, lexicon) = corpus.load()?;
            let specs = load_keyword_specs(&dictionary)?;
            let dict = aggregate_dictionary(&corpus, &lexicon, &specs, from, to)?;
            io::write_weights_csv(&out, dict.entries())
        }
        Command::Index { corpus, dictionary, from, to, out_long, out_wide } => {
            let (corpus, lexicon) = corpus.load()?;
            let specs = load_keyword_specs(&dictionary)?;
            let corpus = filter_corpus(&corpus, from, to, None)?;
            let dict = aggregate_dictionary(&corpus, &lexicon, &specs, from, to)?;
            let tokens: Vec<String> = specs.iter().map(|s| s.token.clone()).collect();
            let series = corpus
                .regions()
                .into_iter()
                .map(|region| {
                    let m = daily_keyword_counts(&corpus, &lexicon, &tokens, &region, from, to)?;
                    pei_core::index::effectiveness_index(&m, &dict)
                })
                .collect::<Result<Vec<_>>>()?;
            io::write_index_long(&out_long, &series)?;
            io::write_index_wide(&out_wide, &series)
        }
        Command::Adf { series, spec, lags } => {
            let data = io::read_series_csv(&series)?;
            let values: Vec<f64> = data.into_iter().map(|(_, v)| v).collect();
            let spec = AdfSpec::parse(&spec)?;
            let r = adf_test(&values, spec, lags)?;
            println!(
                "{} statistic {:.4} p-value {:.4} lags {}",
                r.spec.label(),
                r.statistic,
                r.p_value,
                r.lags
            );
            Ok(())
        }
        Command::Ccf { y, x, max_lag, out } => {
            let ys: Vec<f64> = io::read_series_csv(&y)?.into_iter().map(|(_, v)| v).collect();
            let xs: Vec<f64> = io::read_series_csv(&x)?.into_iter().map(|(_, v)| v).collect();
            let c = ccf(&ys, &xs, max_lag)?;
            let write = |w: &mut csv::Writer<Box<dyn std::io::Write>>| -> Result<()> {
                w.write_record(["lag", "rho"]).map_err(csv_err)?;
                for k in c.lags() {
                    w.write_record([k.to_string(), c.rho(k).to_string()]).map_err(csv_err)?;
                }
                w.flush().map_err(|e| Error::Validation(e.to_string()))
            };
            match out {
                Some(path) => {
                    let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
                    let mut w =
                        csv::Writer::from_writer(Box::new(file) as Box<dyn std::io::Write>);
                    write(&mut w)
                }
                None => write(&mut csv_stdout()),
            }
        }
        Command::Classify { index, central, max_lag, out } => {
            let series = io::read_index_wide(&index)?;
            pei_core::pipeline::write_ccf_classification(&out, &series, &central, max_lag)
        }
        Command::Garch { series, name, out } => {
            let data = io::read_series_csv(&series)?;
            let values: Vec<f64> = data.into_iter().map(|(_, v)| v).collect();
            let fit = fit_ar1_garch11(&values)?;
            println!("log-likelihood {:.6}", fit.loglik);
            let table = garch_param_table(&fit, &name);
            match out {
                Some(path) => {
                    let mut file =
                        std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
                    table.to_csv(&mut file)
                }
                None => {
                    print!("{}", table.to_csv_string()?);
                    Ok(())
                }
            }
        }
        Command::Dcc { series, names, policy, out_params, out_cov } => {
            if series.len() < 2 {
                return Err(Error::Argument("dcc needs at least two --series files".into()));
            }
            let names: Vec<String> = match names {
                Some(n) => {
                    if n.len() != series.len() {
                        return Err(Error::Argument(format!(
                            "{} names for {} series",
                            n.len(),
                            series.len()
                        )));
                    }
                    n
                }
                None => series
                    .iter()
                    .map(|p| {
                        p.file_stem()
                            .map(|s| s.to_string_lossy().into_owned())
                            .unwrap_or_else(|| p.display().to_string())
                    })
                    .collect(),
            };
            let policy = AlignmentPolicy::parse(&policy)?;
            let mut map = BTreeMap::new();
            for (name, path) in names.iter().zip(&series) {
                map.insert(name.clone(), io::read_series_csv(path)?);
            }
            if map.len() != names.len() {
                return Err(Error::Argument("series names must be unique".into()));
            }
            let panel = align(&map, policy)?;
            let ordered: Vec<Vec<f64>> =
                names.iter().map(|n| panel.series[n].clone()).collect();
            let fit = fit_dcc(&ordered)?;
            println!("dcc alpha {:.6} beta {:.6}", fit.corr.alpha, fit.corr.beta);
            let table = param_table(&fit, &names)?;
            let mut file =
                std::fs::File::create(&out_params).map_err(|e| Error::io(&out_params, e))?;
            table.to_csv(&mut file)?;
            if let Some(path) = out_cov {
                let mut rows = Vec::new();
                for (i, j, values) in covariance_pairs(&fit) {
                    let label = format!("{}:{}", names[i], names[j]);
                    for (d, v) in panel.dates[1..].iter().zip(&values) {
                        rows.push((*d, label.clone(), *v));
                    }
                }
                io::write_labeled_series_csv(&path, "pair", &rows)?;
            }
            Ok(())
        }
        Command::Groups { index, group_map, out } => {
            let series = io::read_index_wide(&index)?;
            let groups = io::read_group_map(&group_map)?;
            let region_index: BTreeMap<&str, usize> = series
                .iter()
                .enumerate()
                .map(|(i, s)| (s.region.as_str(), i))
                .collect();
            let mut spec = GroupSpec::default();
            for (group, members) in &groups {
                let mut indices = BTreeSet::new();
                for region in members {
                    let &i = region_index.get(region.as_str()).ok_or_else(|| {
                        Error::Argument(format!(
                            "group '{group}' references unknown region '{region}'"
                        ))
                    })?;
                    indices.insert(i);
                }
                spec.groups.insert(group.clone(), indices);
            }
            let values: Vec<Vec<f64>> = series.iter().map(|s| s.values.clone()).collect();
            let fit = fit_dcc(&values)?;
            let vols = group_volatility(&fit.h_path, &spec)?;
            let dates = &series[0].dates;
            let rows: Vec<(NaiveDate, String, f64)> = vols
                .iter()
                .flat_map(|(g, vs)| {
                    dates[1..].iter().zip(vs).map(|(d, v)| (*d, g.clone(), *v)).collect::<Vec<_>>()
                })
                .collect();
            io::write_labeled_series_csv(&out, "group", &rows)
        }
        Command::Report { config, out } => {
            let cfg = PipelineConfig::from_file(&config)?;
            let bundle = run_pipeline(&cfg, &out)?;
            println!("report written to {}", bundle.out_dir.display());
            for f in &bundle.files {
                println!("  {}", f.display());
            }
            Ok(())
        }
    }
}

/// Aggregate keyword counts over all regions and build the weighted
/// dictionary for the window.
fn aggregate_dictionary(
    corpus: &Corpus,
    lexicon: &Lexicon,
    specs: &[pei_core::index::KeywordSpec],
    from: NaiveDate,
    to: NaiveDate,
) -> Result<pei_core::index::KeywordDictionary> {
    let corpus = filter_corpus(corpus, from, to, None)?;
    if corpus.is_empty() {
        return Err(Error::Validation(format!("no documents in {from}..{to}")));
    }
    let tokens: Vec<String> = specs.iter().map(|s| s.token.clone()).collect();
    let mut aggregate: Option<pei_core::index::KeywordCountMatrix> = None;
    for region in corpus.regions() {
        let m = daily_keyword_counts(&corpus, lexicon, &tokens, &region, from, to)?;
        aggregate = Some(match aggregate {
            Some(acc) => acc.merged_with(&m, "ALL")?,
            None => m,
        });
    }
    let aggregate = aggregate.expect("non-empty corpus has regions");
    let (dict, excluded) = build_dictionary(&aggregate, specs)?;
    if !excluded.is_empty() {
        log::warn!("{} keywords never occur and were dropped", excluded.len());
    }
    Ok(dict)
}

fn csv_stdout() -> csv::Writer<Box<dyn std::io::Write>> {
    csv::Writer::from_writer(Box::new(std::io::stdout()) as Box<dyn std::io::Write>)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Validation(format!("csv: {e}"))
}
