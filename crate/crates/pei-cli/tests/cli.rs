//! End-to-end checks of the `pei` binary: subcommand output and the exit
//! code contract (0 ok, 2 validation, 3 estimation, 4 I/O).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn pei() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pei"))
}

fn run(args: &[&str]) -> Output {
    pei().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

struct Fixture {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

impl Fixture {
    fn path(&self, name: &str) -> String {
        self.root.join(name).display().to_string()
    }
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    let corpus = r#"{"region":"Hubei","date":"2020-01-01","title":"notice","text":"loan loan rescue"}
{"region":"Hubei","date":"2020-01-02","title":"notice","text":"rescue open"}
{"region":"Hainan","date":"2020-01-02","title":"notice","text":"loan"}
"#;
    std::fs::write(root.join("corpus.jsonl"), corpus).unwrap();
    std::fs::write(root.join("lexicon.txt"), "loan\nrescue\nopen\nnotice\n").unwrap();
    std::fs::write(root.join("dictionary.csv"), "keyword,type\nloan,E\nrescue,D\n").unwrap();
    write_series(&root.join("garch_series.csv"), 400, 7);
    Fixture { _dir: dir, root }
}

fn write_series(path: &Path, n: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = String::from("date,value\n");
    let start: chrono::NaiveDate = "2019-01-01".parse().unwrap();
    let mut sigma2: f64 = 1.0;
    let mut eps: f64 = 0.0;
    for i in 0..n {
        sigma2 = 0.2 + 0.1 * eps * eps + 0.7 * sigma2;
        let z: f64 = rng.sample(StandardNormal);
        eps = sigma2.sqrt() * z;
        writeln!(s, "{},{}", start + chrono::Days::new(i as u64), eps).unwrap();
    }
    std::fs::write(path, s).unwrap();
}

#[test]
fn ingest_reports_summary() {
    let fx = fixture();
    let out = run(&["ingest", "--corpus", &fx.path("corpus.jsonl")]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("documents: 3"));
    assert!(text.contains("window: 2020-01-01..2020-01-02"));
    assert!(text.contains("regions: Hainan,Hubei"));
}

#[test]
fn freq_emits_csv_to_stdout() {
    let fx = fixture();
    let out = run(&[
        "freq",
        "--corpus",
        &fx.path("corpus.jsonl"),
        "--lexicon",
        &fx.path("lexicon.txt"),
        "--top",
        "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "token,count");
    assert_eq!(lines[1], "loan,3");
    assert_eq!(lines[2], "notice,3");
}

#[test]
fn weights_computes_entropy_dictionary() {
    let fx = fixture();
    let out_path = fx.path("weights.csv");
    let out = run(&[
        "weights",
        "--corpus",
        &fx.path("corpus.jsonl"),
        "--lexicon",
        &fx.path("lexicon.txt"),
        "--dictionary",
        &fx.path("dictionary.csv"),
        "--from",
        "2020-01-01",
        "--to",
        "2020-01-02",
        "--out",
        &out_path,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("keyword,type,d,w"));
    // loan counts by day: [3, 1]; rescue: [1, 1] (uniform, d = 0) -> loan gets all weight.
    let loan_line = text.lines().find(|l| l.starts_with("loan,")).unwrap();
    assert!(loan_line.ends_with(",1"), "line: {loan_line}");
}

#[test]
fn adf_prints_result_line() {
    let fx = fixture();
    let out = run(&["adf", "--series", &fx.path("garch_series.csv"), "--spec", "c"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("C statistic"));
}

#[test]
fn adf_rejects_unknown_spec_with_code_2() {
    let fx = fixture();
    let out = run(&["adf", "--series", &fx.path("garch_series.csv"), "--spec", "xx"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_file_exits_4() {
    let out = run(&["ingest", "--corpus", "/nonexistent/corpus.jsonl"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn malformed_corpus_exits_2() {
    let fx = fixture();
    std::fs::write(fx.root.join("bad.jsonl"), "{\"region\":\"Hubei\"}\n").unwrap();
    let out = run(&["ingest", "--corpus", &fx.path("bad.jsonl")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn garch_emits_param_table() {
    let fx = fixture();
    let out = run(&[
        "garch",
        "--series",
        &fx.path("garch_series.csv"),
        "--name",
        "stock",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("log-likelihood"));
    assert!(text.contains("[stock].mu"));
    assert!(text.contains("[stock].beta1"));
}

#[test]
fn garch_too_short_series_exits_2() {
    let fx = fixture();
    write_series(&fx.root.join("short.csv"), 10, 3);
    let out = run(&["garch", "--series", &fx.path("short.csv")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ccf_emits_lag_table() {
    let fx = fixture();
    write_series(&fx.root.join("a.csv"), 100, 11);
    write_series(&fx.root.join("b.csv"), 100, 12);
    let out = run(&[
        "ccf",
        "--y",
        &fx.path("a.csv"),
        "--x",
        &fx.path("b.csv"),
        "--max-lag",
        "8",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("lag,rho"));
    assert_eq!(text.lines().count(), 18); // header + 17 lags
}

#[test]
fn dcc_fits_two_series() {
    let fx = fixture();
    write_series(&fx.root.join("a.csv"), 300, 21);
    write_series(&fx.root.join("b.csv"), 300, 22);
    let params = fx.path("params.csv");
    let cov = fx.path("cov.csv");
    let out = run(&[
        "dcc",
        "--series",
        &format!("{},{}", fx.path("a.csv"), fx.path("b.csv")),
        "--out-params",
        &params,
        "--out-cov",
        &cov,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&params).unwrap();
    assert_eq!(text.lines().count(), 13); // header + 2*5 + 2 joint rows
    assert!(text.contains("[Joint]dcca1"));
    let cov_text = std::fs::read_to_string(&cov).unwrap();
    assert!(cov_text.starts_with("date,pair,value"));
    assert!(cov_text.contains("a:b"));
}

#[test]
fn report_rejects_small_ccf_lag_with_code_2() {
    let fx = fixture();
    let config = "\
corpus = corpus.jsonl
lexicon = lexicon.txt
dictionary = dictionary.csv
group_map = groups.csv
covid_series = covid.csv
stock_series = stock.csv
window_from = 2020-01-01
window_to = 2020-01-02
ccf_max_lag = 7
";
    std::fs::write(fx.root.join("report.conf"), config).unwrap();
    let out = run(&["report", "--config", &fx.path("report.conf"), "--out", &fx.path("out")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ccf_max_lag"));
}

#[test]
fn report_runs_on_demo_dataset() {
    // The shipped demo is the smoke contract for the whole pipeline.
    let demo = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../demo");
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("report");
    let out = run(&[
        "report",
        "--config",
        &demo.join("report.conf").display().to_string(),
        "--out",
        &out_dir.display().to_string(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for artifact in [
        "weights.csv",
        "index_long.csv",
        "index_wide.csv",
        "adf.csv",
        "ccf_classification.csv",
        "dcc_params.csv",
        "dcc_covariance.csv",
        "group_volatility.csv",
    ] {
        assert!(out_dir.join(artifact).exists(), "missing {artifact}");
    }
    assert!(out_dir.join("charts").read_dir().unwrap().count() > 10);
}
