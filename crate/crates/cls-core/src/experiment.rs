//! Experiment orchestration: dataset assembly, run/sweep drivers, and
//! artifact emission.
//!
//! A run writes two files into its output directory: `metrics.jsonl` (one
//! [`MetricsRecord`] per line) and `summary.json` (config echo plus final
//! and best accuracies). Everything except the wall-time field is
//! deterministic for a fixed config on one platform. An optional
//! `curves.csv` carries the learning curves for external plotting.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;

use crate::data::{load_csv, make_blobs, make_two_moons, split_ssl, Dataset, SplitTag, UnlabeledSet};
use crate::error::{Error, Result};
use crate::metrics::MetricsRecord;
use crate::rng;
use crate::trainer::{train, TrainConfig, Variant};

/// Default centers of the `blobs` dataset.
pub const BLOB_CENTERS: [[f64; 2]; 3] = [[-3.0, 0.0], [3.0, 0.0], [0.0, 3.0]];

/// Which dataset a run trains on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetSpec {
    TwoMoons,
    Blobs,
    Csv(PathBuf),
}

impl fmt::Display for DatasetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetSpec::TwoMoons => f.write_str("two_moons"),
            DatasetSpec::Blobs => f.write_str("blobs"),
            DatasetSpec::Csv(path) => write!(f, "csv:{}", path.display()),
        }
    }
}

impl FromStr for DatasetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two_moons" => Ok(DatasetSpec::TwoMoons),
            "blobs" => Ok(DatasetSpec::Blobs),
            other => {
                if let Some(path) = other.strip_prefix("csv:") {
                    if path.is_empty() {
                        return Err(Error::config("csv dataset needs a path: csv:<path>"));
                    }
                    Ok(DatasetSpec::Csv(PathBuf::from(path)))
                } else {
                    Err(Error::config(format!(
                        "unknown dataset {other:?}; valid values: two_moons, blobs, csv:<path>"
                    )))
                }
            }
        }
    }
}

impl serde::Serialize for DatasetSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Full configuration of one experiment: the training knobs plus dataset
/// construction and output settings.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub train: TrainConfig,
    pub dataset: DatasetSpec,
    pub n_labeled: usize,
    pub n_unlabeled: usize,
    pub n_test: usize,
    /// Gaussian noise of the synthetic two-moons arcs.
    pub data_noise: f64,
    /// Cluster std of the synthetic blobs.
    pub blob_std: f64,
    /// Whether a CSV dataset starts with a header row.
    pub csv_header: bool,
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
    /// Also emit `curves.csv`.
    #[serde(skip)]
    pub emit_csv: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            train: TrainConfig::default(),
            dataset: DatasetSpec::TwoMoons,
            n_labeled: 8,
            n_unlabeled: 2000,
            n_test: 500,
            data_noise: 0.1,
            blob_std: 0.8,
            csv_header: false,
            out_dir: None,
            emit_csv: false,
        }
    }
}

/// Parse flat `key=value` text (one pair per line, `#` comments allowed).
pub fn parse_kv_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::config(format!("config line {}: expected key=value, got {raw:?}", i + 1)));
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn parse_as<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| Error::config(format!("invalid value {value:?} for {key}: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::config(format!("invalid boolean {value:?} for {key}"))),
    }
}

/// Apply one `key=value` setting. Shared between the config-file loader, the
/// CLI override path, and the C API.
pub fn apply_kv(cfg: &mut ExperimentConfig, key: &str, value: &str) -> Result<()> {
    match key {
        "variant" => cfg.train.variant = value.parse()?,
        "dataset" => cfg.dataset = value.parse()?,
        "n_labeled" => cfg.n_labeled = parse_as(key, value)?,
        "n_unlabeled" => cfg.n_unlabeled = parse_as(key, value)?,
        "n_test" => cfg.n_test = parse_as(key, value)?,
        "data_noise" => cfg.data_noise = parse_as(key, value)?,
        "blob_std" => cfg.blob_std = parse_as(key, value)?,
        "csv_header" => cfg.csv_header = parse_bool(key, value)?,
        "alpha" => cfg.train.alpha = parse_as(key, value)?,
        "mu" => cfg.train.mu = parse_as(key, value)?,
        "batch" => cfg.train.batch = parse_as(key, value)?,
        "iters" => cfg.train.t_total = parse_as(key, value)?,
        "tau" => cfg.train.tau = parse_as(key, value)?,
        "lambda1" => cfg.train.lambda1 = parse_as(key, value)?,
        "lambda2" => cfg.train.lambda2 = parse_as(key, value)?,
        "gamma" => cfg.train.gamma = parse_as(key, value)?,
        "epsilon" => cfg.train.epsilon = parse_as(key, value)?,
        "seed1" => cfg.train.seed1 = parse_as(key, value)?,
        "seed2" => cfg.train.seed2 = parse_as(key, value)?,
        "data_seed" => cfg.train.data_seed = parse_as(key, value)?,
        "hidden" => {
            let widths: Result<Vec<usize>> = value
                .split(',')
                .map(|s| parse_as::<usize>(key, s.trim()))
                .collect();
            cfg.train.hidden = widths?;
        }
        "momentum" => cfg.train.momentum = parse_as(key, value)?,
        "weight_decay" => cfg.train.weight_decay = parse_as(key, value)?,
        "weak_noise" => cfg.train.weak_noise = parse_as(key, value)?,
        "strong_noise" => cfg.train.strong_noise = parse_as(key, value)?,
        "dropout_prob" => cfg.train.dropout_prob = parse_as(key, value)?,
        "scale_jitter" => cfg.train.scale_jitter = parse_as(key, value)?,
        "labeled_aug" => cfg.train.labeled_aug = value.parse()?,
        "eval_every" => cfg.train.eval_every = parse_as(key, value)?,
        "ema_decay" => cfg.train.ema_decay = parse_as(key, value)?,
        "out" => cfg.out_dir = Some(PathBuf::from(value)),
        "csv" => cfg.emit_csv = parse_bool(key, value)?,
        other => return Err(Error::config(format!("unknown config key {other:?}"))),
    }
    Ok(())
}

/// Load a config file and apply it on top of defaults.
pub fn load_config_file(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::default();
    for (key, value) in parse_kv_text(&text)? {
        apply_kv(&mut cfg, &key, &value)?;
    }
    Ok(cfg)
}

// ---------------------------------------------------------------------------
// Dataset assembly
// ---------------------------------------------------------------------------

/// The three views a run trains and evaluates on.
pub struct PreparedData {
    pub labeled: Dataset,
    pub unlabeled: UnlabeledSet,
    pub test: Dataset,
    /// True labels of the unlabeled view, for offline diagnostics only; the
    /// training path never sees them.
    pub heldout_truth: Vec<usize>,
}

/// Materialize the datasets for a config.
///
/// Synthetic datasets draw the training pool and the test set from disjoint
/// sub-seeds of `data_seed`; CSV data is shuffled once, `n_test` rows become
/// the test set, and the rest is split into labeled/unlabeled views.
pub fn prepare_data(cfg: &ExperimentConfig) -> Result<PreparedData> {
    let seed = cfg.train.data_seed;
    match &cfg.dataset {
        DatasetSpec::TwoMoons => {
            let pool = make_two_moons(cfg.n_labeled + cfg.n_unlabeled, cfg.data_noise, seed)?;
            let test = Dataset { tag: SplitTag::Test, ..make_two_moons(cfg.n_test, cfg.data_noise, seed.wrapping_add(0x7e57))? };
            let (labeled, unlabeled, heldout_truth) = split_ssl(&pool, cfg.n_labeled, seed.wrapping_add(0x5917))?;
            Ok(PreparedData { labeled, unlabeled, test, heldout_truth })
        }
        DatasetSpec::Blobs => {
            let centers: Vec<Vec<f64>> = BLOB_CENTERS.iter().map(|c| c.to_vec()).collect();
            let pool = make_blobs(cfg.n_labeled + cfg.n_unlabeled, &centers, cfg.blob_std, seed)?;
            let test = Dataset { tag: SplitTag::Test, ..make_blobs(cfg.n_test, &centers, cfg.blob_std, seed.wrapping_add(0x7e57))? };
            let (labeled, unlabeled, heldout_truth) = split_ssl(&pool, cfg.n_labeled, seed.wrapping_add(0x5917))?;
            Ok(PreparedData { labeled, unlabeled, test, heldout_truth })
        }
        DatasetSpec::Csv(path) => {
            let full = load_csv(path, cfg.csv_header)?;
            if cfg.n_test == 0 || cfg.n_test + cfg.n_labeled > full.len() {
                return Err(Error::config(format!(
                    "csv has {} rows; cannot reserve n_test = {} plus n_labeled = {}",
                    full.len(),
                    cfg.n_test,
                    cfg.n_labeled
                )));
            }
            let mut order: Vec<usize> = (0..full.len()).collect();
            order.shuffle(&mut rng::stream(seed, 0xC57));
            let (test_idx, pool_idx) = order.split_at(cfg.n_test);
            let test = Dataset {
                features: test_idx.iter().map(|&i| full.features[i].clone()).collect(),
                labels: test_idx.iter().map(|&i| full.labels[i]).collect(),
                class_count: full.class_count,
                tag: SplitTag::Test,
            };
            let pool = Dataset {
                features: pool_idx.iter().map(|&i| full.features[i].clone()).collect(),
                labels: pool_idx.iter().map(|&i| full.labels[i]).collect(),
                class_count: full.class_count,
                tag: SplitTag::Source,
            };
            let (labeled, unlabeled, heldout_truth) = split_ssl(&pool, cfg.n_labeled, seed.wrapping_add(0x5917))?;
            Ok(PreparedData { labeled, unlabeled, test, heldout_truth })
        }
    }
}

// ---------------------------------------------------------------------------
// Run driver
// ---------------------------------------------------------------------------

/// Final and best accuracies of one run, plus the config echo.
///
/// `headline_acc` is the final mean of the two networks for dual-network
/// variants and network 1's final accuracy for single-network ones.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RunSummary {
    pub variant: String,
    pub iterations: usize,
    pub seed1: u64,
    pub seed2: u64,
    pub data_seed: u64,
    pub final_acc_net1: f64,
    pub final_acc_net2: f64,
    pub final_acc_mean: f64,
    pub final_acc_ema: f64,
    pub best_acc_net1: f64,
    pub best_acc_net2: f64,
    pub best_acc_mean: f64,
    pub headline_acc: f64,
    pub config: ExperimentConfig,
    pub wall_time_s: f64,
}

/// One finished experiment: the metrics log and its summary.
pub struct RunResult {
    pub metrics: Vec<MetricsRecord>,
    pub summary: RunSummary,
}

impl RunResult {
    pub fn metrics_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for record in &self.metrics {
            out.push_str(&serde_json::to_string(record)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn summary_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.summary)?;
        s.push('\n');
        Ok(s)
    }

    pub fn curves_csv(&self) -> String {
        let mut out = String::from(
            "iteration,lr,test_acc_net1,test_acc_net2,test_acc_mean,test_acc_ema,pl_overlap,nl_overlap,exchange_ratio,dist_theta1_theta2,dist_theta1_ema\n",
        );
        for m in &self.metrics {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                m.iteration,
                m.lr,
                m.test_acc_net1,
                m.test_acc_net2,
                m.test_acc_mean,
                m.test_acc_ema,
                m.pl_overlap,
                m.nl_overlap,
                m.exchange_ratio,
                m.dist_theta1_theta2,
                m.dist_theta1_ema
            ));
        }
        out
    }
}

/// Run one experiment; writes artifacts when the config names an output
/// directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunResult> {
    let started = Instant::now();
    let normalized = ExperimentConfig { train: cfg.train.validated()?, ..cfg.clone() };
    let data = prepare_data(&normalized)?;
    let output = train(&normalized.train, &data.labeled, &data.unlabeled, &data.test)?;

    let metrics = output.metrics;
    let last = metrics.last().expect("metrics always contain the iteration-0 row");
    let fold = |f: fn(&MetricsRecord) -> f64| {
        metrics.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
    };
    let headline = if normalized.train.variant.is_dual() {
        last.test_acc_mean
    } else {
        last.test_acc_net1
    };
    let summary = RunSummary {
        variant: normalized.train.variant.to_string(),
        iterations: normalized.train.t_total,
        seed1: normalized.train.seed1,
        seed2: normalized.train.seed2,
        data_seed: normalized.train.data_seed,
        final_acc_net1: last.test_acc_net1,
        final_acc_net2: last.test_acc_net2,
        final_acc_mean: last.test_acc_mean,
        final_acc_ema: last.test_acc_ema,
        best_acc_net1: fold(|m| m.test_acc_net1),
        best_acc_net2: fold(|m| m.test_acc_net2),
        best_acc_mean: fold(|m| m.test_acc_mean),
        headline_acc: headline,
        config: ExperimentConfig { out_dir: None, emit_csv: false, ..normalized.clone() },
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    let result = RunResult { metrics, summary };
    if let Some(dir) = &normalized.out_dir {
        write_artifacts(&result, dir, normalized.emit_csv)?;
    }
    Ok(result)
}

/// Write `metrics.jsonl`, `summary.json`, and optionally `curves.csv`.
pub fn write_artifacts(result: &RunResult, dir: &Path, emit_csv: bool) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut jsonl = fs::File::create(dir.join("metrics.jsonl"))?;
    jsonl.write_all(result.metrics_jsonl()?.as_bytes())?;
    let mut summary = fs::File::create(dir.join("summary.json"))?;
    summary.write_all(result.summary_json()?.as_bytes())?;
    if emit_csv {
        let mut curves = fs::File::create(dir.join("curves.csv"))?;
        curves.write_all(result.curves_csv().as_bytes())?;
    }
    Ok(())
}

/// Human-readable summary block for the CLI.
pub fn format_summary_table(summary: &RunSummary) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "variant {} | iters {} | seeds ({}, {}) | data_seed {}\n",
        summary.variant, summary.iterations, summary.seed1, summary.seed2, summary.data_seed
    ));
    out.push_str(&format!(
        "{:<12} {:>10} {:>10}\n",
        "", "final", "best"
    ));
    out.push_str(&format!(
        "{:<12} {:>10.4} {:>10.4}\n",
        "acc_net1", summary.final_acc_net1, summary.best_acc_net1
    ));
    out.push_str(&format!(
        "{:<12} {:>10.4} {:>10.4}\n",
        "acc_net2", summary.final_acc_net2, summary.best_acc_net2
    ));
    out.push_str(&format!(
        "{:<12} {:>10.4} {:>10.4}\n",
        "acc_mean", summary.final_acc_mean, summary.best_acc_mean
    ));
    out.push_str(&format!("{:<12} {:>10.4}\n", "acc_ema", summary.final_acc_ema));
    out.push_str(&format!("{:<12} {:>10.4}\n", "headline", summary.headline_acc));
    out.push_str(&format!("{:<12} {:>10.2}s\n", "wall_time", summary.wall_time_s));
    out
}

// ---------------------------------------------------------------------------
// Sweep driver
// ---------------------------------------------------------------------------

/// Mean and spread of the headline accuracy over a seed sweep.
#[derive(Debug, Clone, serde::Serialize)]
pub struct VariantStats {
    pub variant: String,
    pub runs: usize,
    pub mean_acc: f64,
    pub std_acc: f64,
    pub accs: Vec<f64>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepReport {
    pub runs: usize,
    pub variants: Vec<VariantStats>,
    pub config: ExperimentConfig,
}

/// Run every variant `runs` times with offset seeds and report mean +/- std
/// of the headline accuracy. Each run writes its artifacts under
/// `<out>/<variant>/run_<r>/` when an output directory is set.
pub fn sweep(base: &ExperimentConfig, variants: &[Variant], runs: usize) -> Result<SweepReport> {
    if runs == 0 {
        return Err(Error::config("sweep needs at least one run"));
    }
    if variants.is_empty() {
        return Err(Error::config("sweep needs at least one variant"));
    }
    let mut stats = Vec::with_capacity(variants.len());
    for &variant in variants {
        let mut accs = Vec::with_capacity(runs);
        for r in 0..runs as u64 {
            let mut cfg = base.clone();
            cfg.train.variant = variant;
            cfg.train.seed1 = base.train.seed1.wrapping_add(r);
            cfg.train.seed2 = base.train.seed2.wrapping_add(r);
            cfg.train.data_seed = base.train.data_seed.wrapping_add(r);
            cfg.out_dir = base
                .out_dir
                .as_ref()
                .map(|d| d.join(variant.as_str()).join(format!("run_{r:03}")));
            let result = run_experiment(&cfg)?;
            accs.push(result.summary.headline_acc);
        }
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        let std = if accs.len() > 1 {
            (accs.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (accs.len() - 1) as f64)
                .sqrt()
        } else {
            0.0
        };
        stats.push(VariantStats {
            variant: variant.to_string(),
            runs,
            mean_acc: mean,
            std_acc: std,
            accs,
        });
    }
    let report = SweepReport {
        runs,
        variants: stats,
        config: ExperimentConfig { out_dir: None, emit_csv: false, ..base.clone() },
    };
    if let Some(dir) = &base.out_dir {
        fs::create_dir_all(dir)?;
        let mut json = serde_json::to_string_pretty(&report)?;
        json.push('\n');
        fs::write(dir.join("sweep_summary.json"), json)?;
    }
    Ok(report)
}

/// Results table of a sweep.
pub fn format_sweep_table(report: &SweepReport) -> String {
    let mut out = format!("{:<16} {:>10} {:>10} {:>6}\n", "variant", "mean_acc", "std", "runs");
    for v in &report.variants {
        out.push_str(&format!(
            "{:<16} {:>10.4} {:>10.4} {:>6}\n",
            v.variant, v.mean_acc, v.std_acc, v.runs
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.train.t_total = 6;
        cfg.train.batch = 4;
        cfg.train.mu = 2;
        cfg.train.hidden = vec![8];
        cfg.train.eval_every = 3;
        cfg.n_unlabeled = 80;
        cfg.n_test = 40;
        cfg
    }

    #[test]
    fn dataset_spec_parses() {
        assert_eq!(DatasetSpec::from_str("two_moons").unwrap(), DatasetSpec::TwoMoons);
        assert_eq!(DatasetSpec::from_str("blobs").unwrap(), DatasetSpec::Blobs);
        assert_eq!(
            DatasetSpec::from_str("csv:/tmp/d.csv").unwrap(),
            DatasetSpec::Csv(PathBuf::from("/tmp/d.csv"))
        );
        assert!(DatasetSpec::from_str("mnist").is_err());
        assert!(DatasetSpec::from_str("csv:").is_err());
    }

    #[test]
    fn kv_parsing_and_overrides() {
        let pairs = parse_kv_text("# comment\n\nalpha = 0.05\nvariant=fixmatch\n").unwrap();
        assert_eq!(pairs.len(), 2);
        let mut cfg = ExperimentConfig::default();
        for (k, v) in pairs {
            apply_kv(&mut cfg, &k, &v).unwrap();
        }
        assert_eq!(cfg.train.alpha, 0.05);
        assert_eq!(cfg.train.variant, Variant::Fixmatch);
        assert!(apply_kv(&mut cfg, "bogus_key", "1").is_err());
        assert!(apply_kv(&mut cfg, "alpha", "fast").is_err());
        assert!(parse_kv_text("not a pair\n").is_err());
        apply_kv(&mut cfg, "hidden", "16, 8").unwrap();
        assert_eq!(cfg.train.hidden, vec![16, 8]);
    }

    #[test]
    fn prepare_data_shapes() {
        let cfg = small_cfg();
        let data = prepare_data(&cfg).unwrap();
        assert_eq!(data.labeled.len(), 8);
        assert_eq!(data.unlabeled.len(), 80);
        assert_eq!(data.test.len(), 40);
        assert_eq!(data.heldout_truth.len(), 80);
        assert_eq!(data.test.tag, SplitTag::Test);
    }

    #[test]
    fn run_writes_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small_cfg();
        cfg.train.variant = Variant::SupervisedOnly;
        cfg.out_dir = Some(dir.path().to_path_buf());
        cfg.emit_csv = true;
        let result = run_experiment(&cfg).unwrap();
        assert!(dir.path().join("metrics.jsonl").exists());
        assert!(dir.path().join("summary.json").exists());
        assert!(dir.path().join("curves.csv").exists());
        let text = fs::read_to_string(dir.path().join("summary.json")).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["variant"], "supervised_only");
        assert!(value["final_acc_net1"].is_number());
        assert!(value["config"]["alpha"].is_number());
        assert_eq!(result.metrics.first().unwrap().iteration, 0);
        assert_eq!(result.metrics.last().unwrap().iteration, 6);
    }

    #[test]
    fn sweep_reports_every_variant() {
        let mut cfg = small_cfg();
        cfg.train.t_total = 3;
        let report = sweep(&cfg, &[Variant::SupervisedOnly, Variant::Fixmatch], 2).unwrap();
        assert_eq!(report.variants.len(), 2);
        for v in &report.variants {
            assert_eq!(v.accs.len(), 2);
            assert!(v.mean_acc >= 0.0 && v.mean_acc <= 1.0);
        }
        assert!(sweep(&cfg, &[], 2).is_err());
        assert!(sweep(&cfg, &[Variant::Cls], 0).is_err());
    }

    #[test]
    fn csv_dataset_flow() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        let mut rows = String::new();
        for i in 0..40 {
            let c = i % 2;
            rows.push_str(&format!("{}.0,{}.5,{}\n", i, i, c));
        }
        fs::write(&path, rows).unwrap();
        let mut cfg = small_cfg();
        cfg.dataset = DatasetSpec::Csv(path);
        cfg.n_test = 10;
        cfg.n_labeled = 4;
        let data = prepare_data(&cfg).unwrap();
        assert_eq!(data.test.len(), 10);
        assert_eq!(data.labeled.len(), 4);
        assert_eq!(data.unlabeled.len(), 26);
        cfg.n_test = 40;
        assert!(prepare_data(&cfg).is_err());
    }
}
