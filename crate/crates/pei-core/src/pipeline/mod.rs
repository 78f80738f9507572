//! End-to-end report pipeline: corpus → index → diagnostics → volatility,
//! emitting CSV tables and SVG line charts into an output directory.
//!
//! Stages run in a fixed order and every artifact is a pure function of the
//! config and input files; two runs with the same inputs produce
//! byte-identical CSVs.

pub mod align;
pub mod chart;
pub mod config;
pub mod io;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use crate::corpus::{filter_corpus, load_corpus, Corpus};
use crate::diagnostics::{adf_test, ccf, classify_ccf, AdfSpec};
use crate::error::{Error, Result};
use crate::index::{
    build_dictionary, daily_keyword_counts, effectiveness_index, load_keyword_specs,
    IndexSeries, KeywordSpec,
};
use crate::textproc::{segment, term_frequencies, top_terms, Lexicon};
use crate::topics::{fit_lda, format_topic_line};
use crate::volatility::{
    covariance_pairs, fit_dcc, group_volatility, param_table, DccFit, GroupSpec,
};

pub use align::{align, AlignedPanel, AlignmentPolicy};
pub use config::PipelineConfig;

/// Paths of every artifact a report run produced.
#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.at_stage(name))
}

fn slug(name: &str) -> String {
    name.chars().map(|c| if c.is_alphanumeric() { c } else { '_' }).collect()
}

/// Run the full pipeline and write the report bundle into `out_dir`.
pub fn run_pipeline(cfg: &PipelineConfig, out_dir: &Path) -> Result<ReportBundle> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let charts_dir = out_dir.join("charts");
    std::fs::create_dir_all(&charts_dir).map_err(|e| Error::io(&charts_dir, e))?;
    let mut files = Vec::new();

    let (from, to) = cfg.window;
    let corpus = stage("corpus", {
        load_corpus(&cfg.corpus_path).and_then(|c| filter_corpus(&c, from, to, None))
    })?;
    if corpus.is_empty() {
        return Err(Error::Validation(format!(
            "no documents in the window {from}..{to}"
        ))
        .at_stage("corpus"));
    }
    let lex = stage(
        "lexicon",
        Lexicon::from_files(&cfg.lexicon_path, cfg.stopword_path.as_deref()),
    )?;
    let specs = stage("dictionary", {
        load_keyword_specs(&cfg.dictionary_path).and_then(|specs| {
            for s in &specs {
                if !lex.contains(&s.token) {
                    return Err(Error::Argument(format!(
                        "dictionary keyword '{}' is not a lexicon entry",
                        s.token
                    )));
                }
            }
            Ok(specs)
        })
    })?;

    // Term frequency table (the tabular stand-in for a word cloud).
    let tc = term_frequencies(&corpus, &lex);
    let freq_path = out_dir.join("freq.csv");
    stage("frequencies", io::write_counts_csv(&freq_path, ["token", "count"], &top_terms(&tc, usize::MAX)))?;
    files.push(freq_path);

    // Topic model over the filtered corpus.
    let topics_path = out_dir.join("topics.txt");
    stage("topics", {
        let docs: Vec<Vec<String>> = corpus
            .documents()
            .iter()
            .map(|d| {
                let mut toks = segment(&d.title, &lex);
                toks.extend(segment(&d.body, &lex));
                toks
            })
            .collect();
        fit_lda(&docs, &cfg.lda).and_then(|model| {
            let mut out = String::new();
            for k in 0..model.k {
                out.push_str(&format_topic_line(&model, k, 10)?);
                out.push('\n');
            }
            io::write_text(&topics_path, &out)
        })
    })?;
    files.push(topics_path);

    // Entropy weights and per-region index series.
    let regions: Vec<String> = corpus.regions().into_iter().collect();
    if !regions.iter().any(|r| r == &cfg.central_region) {
        return Err(Error::Validation(format!(
            "central region '{}' has no documents in the window",
            cfg.central_region
        ))
        .at_stage("index"));
    }
    let (index_series, weights_path) =
        stage("index", build_index_series(cfg, &corpus, &lex, &specs, &regions, out_dir))?;
    files.push(weights_path);
    let long_path = out_dir.join("index_long.csv");
    let wide_path = out_dir.join("index_wide.csv");
    stage("index", io::write_index_long(&long_path, &index_series))?;
    stage("index", io::write_index_wide(&wide_path, &index_series))?;
    files.push(long_path);
    files.push(wide_path);

    // Align the central index with the external series.
    let central_series = index_series
        .iter()
        .find(|s| s.region == cfg.central_region)
        .expect("central region checked above");
    let panel = stage("align", build_panel(cfg, central_series))?;
    let panel_names =
        [cfg.central_region.clone(), "covid".to_string(), "stock".to_string()];
    let panel_path = out_dir.join("aligned_panel.csv");
    stage("align", write_panel_csv(&panel_path, &panel, &panel_names))?;
    files.push(panel_path);

    // Unit-root table for the three aligned series.
    let adf_path = out_dir.join("adf.csv");
    stage("adf", write_adf_csv(&adf_path, &panel, &panel_names))?;
    files.push(adf_path);

    // Cross-correlation classification of every region against central.
    let ccf_path = out_dir.join("ccf_classification.csv");
    stage(
        "ccf",
        write_ccf_classification(&ccf_path, &index_series, &cfg.central_region, cfg.ccf_max_lag),
    )?;
    files.push(ccf_path);

    // Three-series DCC-GARCH and its artifacts.
    let tri_fit = stage("dcc", {
        let series: Vec<Vec<f64>> =
            panel_names.iter().map(|n| panel.series[n].clone()).collect();
        fit_dcc(&series)
    })?;
    let params_path = out_dir.join("dcc_params.csv");
    stage("dcc", {
        let table = param_table(&tri_fit, &panel_names)?;
        let mut file = std::fs::File::create(&params_path)
            .map_err(|e| Error::io(&params_path, e))?;
        table.to_csv(&mut file)
    })?;
    files.push(params_path);
    let cov_path = out_dir.join("dcc_covariance.csv");
    let cov_rows = covariance_rows(&tri_fit, &panel.dates, &panel_names);
    stage("dcc", io::write_labeled_series_csv(&cov_path, "pair", &cov_rows))?;
    files.push(cov_path);

    // Grouped volatility over all regional index series.
    let group_path = out_dir.join("group_volatility.csv");
    let group_series = stage("groups", build_group_volatility(cfg, &index_series))?;
    let window_dates: Vec<NaiveDate> = index_series[0].dates.clone();
    stage("groups", {
        let rows: Vec<(NaiveDate, String, f64)> = group_series
            .iter()
            .flat_map(|(g, vs)| {
                window_dates[1..]
                    .iter()
                    .zip(vs)
                    .map(|(d, v)| (*d, g.clone(), *v))
                    .collect::<Vec<_>>()
            })
            .collect();
        io::write_labeled_series_csv(&group_path, "group", &rows)
    })?;
    files.push(group_path);

    // Line charts for every emitted series.
    stage("charts", {
        for s in &index_series {
            let p = charts_dir.join(format!("index_{}.svg", slug(&s.region)));
            io::write_text(&p, &chart::line_chart_svg(&format!("index {}", s.region), &s.dates, &s.values))?;
            files.push(p);
        }
        for name in &panel_names {
            let p = charts_dir.join(format!("panel_{}.svg", slug(name)));
            io::write_text(&p, &chart::line_chart_svg(name, &panel.dates, &panel.series[name]))?;
            files.push(p);
        }
        for (i, j, series) in covariance_pairs(&tri_fit) {
            let label = format!("{}:{}", panel_names[i], panel_names[j]);
            let p = charts_dir.join(format!(
                "covariance_{}_{}.svg",
                slug(&panel_names[i]),
                slug(&panel_names[j])
            ));
            io::write_text(&p, &chart::line_chart_svg(&label, &panel.dates[1..], &series))?;
            files.push(p);
        }
        for (g, vs) in &group_series {
            let p = charts_dir.join(format!("group_{}.svg", slug(g)));
            io::write_text(&p, &chart::line_chart_svg(&format!("group {g}"), &window_dates[1..], vs))?;
            files.push(p);
        }
        Ok(())
    })?;

    // Run metadata: config echo plus the chosen alignment policy.
    let meta_path = out_dir.join("run_meta.txt");
    let mut meta = String::new();
    meta.push_str(&format!("window = {from}..{to}\n"));
    meta.push_str(&format!("alignment_policy = {}\n", panel.policy.label()));
    meta.push_str(&format!("central_region = {}\n", cfg.central_region));
    meta.push_str(&format!("ccf_max_lag = {}\n", cfg.ccf_max_lag));
    meta.push_str(&format!(
        "lda = k={} alpha={} beta={} iterations={} seed={}\n",
        cfg.lda.k, cfg.lda.alpha, cfg.lda.beta, cfg.lda.iterations, cfg.lda.seed
    ));
    meta.push_str(&format!("regions = {}\n", regions.join(",")));
    stage("report", io::write_text(&meta_path, &meta))?;
    files.push(meta_path);

    Ok(ReportBundle { out_dir: out_dir.to_path_buf(), files })
}

/// Keyword count matrices per region, entropy weights from the aggregate,
/// and the per-region index series.
fn build_index_series(
    cfg: &PipelineConfig,
    corpus: &Corpus,
    lex: &Lexicon,
    specs: &[KeywordSpec],
    regions: &[String],
    out_dir: &Path,
) -> Result<(Vec<IndexSeries>, PathBuf)> {
    let (from, to) = cfg.window;
    let tokens: Vec<String> = specs.iter().map(|s| s.token.clone()).collect();
    let matrices: Vec<_> = regions
        .iter()
        .map(|r| daily_keyword_counts(corpus, lex, &tokens, r, from, to))
        .collect::<Result<_>>()?;
    let mut aggregate = matrices[0].clone();
    for m in &matrices[1..] {
        aggregate = aggregate.merged_with(m, "ALL")?;
    }
    let (dict, excluded) = build_dictionary(&aggregate, specs)?;
    if !excluded.is_empty() {
        log::warn!(
            "{} dictionary keywords never occur in the window: {}",
            excluded.len(),
            excluded.join(", ")
        );
    }
    let weights_path = out_dir.join("weights.csv");
    io::write_weights_csv(&weights_path, dict.entries())?;
    let series = matrices
        .iter()
        .map(|m| effectiveness_index(m, &dict))
        .collect::<Result<Vec<_>>>()?;
    Ok((series, weights_path))
}

fn build_panel(cfg: &PipelineConfig, central: &IndexSeries) -> Result<AlignedPanel> {
    if cfg.central_region == "covid" || cfg.central_region == "stock" {
        return Err(Error::Validation(
            "central region must not be named 'covid' or 'stock'".into(),
        ));
    }
    let (from, to) = cfg.window;
    let clip = |series: Vec<(NaiveDate, f64)>| -> Vec<(NaiveDate, f64)> {
        series.into_iter().filter(|(d, _)| *d >= from && *d <= to).collect()
    };
    let covid = clip(io::read_series_csv(&cfg.covid_path)?);
    let stock = clip(io::read_series_csv(&cfg.stock_path)?);
    let mut map = BTreeMap::new();
    map.insert(
        cfg.central_region.clone(),
        central.dates.iter().copied().zip(central.values.iter().copied()).collect(),
    );
    map.insert("covid".to_string(), covid);
    map.insert("stock".to_string(), stock);
    align(&map, cfg.alignment_policy)
}

fn write_panel_csv(path: &Path, panel: &AlignedPanel, names: &[String; 3]) -> Result<()> {
    let mut w = io::writer(path)?;
    let mut header = vec!["date".to_string()];
    header.extend(names.iter().cloned());
    w.write_record(&header).map_err(|e| Error::Validation(format!("csv: {e}")))?;
    for (i, d) in panel.dates.iter().enumerate() {
        let mut row = vec![d.to_string()];
        row.extend(names.iter().map(|n| panel.series[n][i].to_string()));
        w.write_record(&row).map_err(|e| Error::Validation(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Unit-root summary: one row per series, statistic and p-value per
/// regression spec.
fn write_adf_csv(path: &Path, panel: &AlignedPanel, names: &[String; 3]) -> Result<()> {
    let mut w = io::writer(path)?;
    w.write_record([
        "series",
        "nc_statistic",
        "nc_p",
        "c_statistic",
        "c_p",
        "ct_statistic",
        "ct_p",
        "lags",
    ])
    .map_err(|e| Error::Validation(format!("csv: {e}")))?;
    for name in names {
        let x = &panel.series[name];
        let mut row = vec![name.clone()];
        let mut lags = 0;
        for spec in [AdfSpec::NoConstant, AdfSpec::Constant, AdfSpec::ConstantTrend] {
            let r = adf_test(x, spec, None)?;
            row.push(r.statistic.to_string());
            row.push(r.p_value.to_string());
            lags = r.lags;
        }
        row.push(lags.to_string());
        w.write_record(&row).map_err(|e| Error::Validation(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Write the shape-classification table: one row per non-central region
/// with the three property columns, plus a count summary row.
pub fn write_ccf_classification(
    path: &Path,
    index_series: &[IndexSeries],
    central_region: &str,
    max_lag: usize,
) -> Result<()> {
    let central = index_series
        .iter()
        .find(|s| s.region == central_region)
        .ok_or_else(|| {
            Error::Argument(format!("central region '{central_region}' has no index series"))
        })?;
    let mut w = io::writer(path)?;
    w.write_record(["region", "right_volatility_bias", "short_negative", "long_positive"])
        .map_err(|e| Error::Validation(format!("csv: {e}")))?;
    let mut counts = [0u32; 3];
    for s in index_series.iter().filter(|s| s.region != central_region) {
        let c = ccf(&s.values, &central.values, max_lag)?;
        let cls = classify_ccf(&c)?;
        counts[0] += cls.right_volatility_bias as u32;
        counts[1] += cls.short_negative as u32;
        counts[2] += cls.long_positive as u32;
        w.write_record([
            s.region.as_str(),
            &cls.right_volatility_bias.to_string(),
            &cls.short_negative.to_string(),
            &cls.long_positive.to_string(),
        ])
        .map_err(|e| Error::Validation(format!("csv: {e}")))?;
    }
    w.write_record([
        "Count",
        &counts[0].to_string(),
        &counts[1].to_string(),
        &counts[2].to_string(),
    ])
    .map_err(|e| Error::Validation(format!("csv: {e}")))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn covariance_rows(
    fit: &DccFit,
    panel_dates: &[NaiveDate],
    names: &[String; 3],
) -> Vec<(NaiveDate, String, f64)> {
    let mut rows = Vec::new();
    for (i, j, series) in covariance_pairs(fit) {
        let label = format!("{}:{}", names[i], names[j]);
        for (d, v) in panel_dates[1..].iter().zip(&series) {
            rows.push((*d, label.clone(), *v));
        }
    }
    rows
}

fn build_group_volatility(
    cfg: &PipelineConfig,
    index_series: &[IndexSeries],
) -> Result<BTreeMap<String, Vec<f64>>> {
    let group_map = io::read_group_map(&cfg.group_map_path)?;
    let region_index: BTreeMap<&str, usize> = index_series
        .iter()
        .enumerate()
        .map(|(i, s)| (s.region.as_str(), i))
        .collect();
    let mut spec = GroupSpec::default();
    for (group, members) in &group_map {
        let mut indices = std::collections::BTreeSet::new();
        for region in members {
            match region_index.get(region.as_str()) {
                Some(&i) => {
                    indices.insert(i);
                }
                None => {
                    return Err(Error::Argument(format!(
                        "group '{group}' references region '{region}' which has no index series"
                    )))
                }
            }
        }
        spec.groups.insert(group.clone(), indices);
    }
    let series: Vec<Vec<f64>> = index_series.iter().map(|s| s.values.clone()).collect();
    let fit = fit_dcc(&series)?;
    group_volatility(&fit.h_path, &spec)
}
