//! Experiment CLI: `run` one configuration, `sweep` seeds across variants,
//! or `selftest` the oracle suite.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cls_core::error::Error;
use cls_core::experiment::{
    apply_kv, format_summary_table, format_sweep_table, load_config_file, run_experiment, sweep,
    ExperimentConfig,
};
use cls_core::trainer::Variant;

#[derive(Parser)]
#[command(name = "cls", about = "Cross-labeling semi-supervised training experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one variant and write metrics.jsonl + summary.json.
    Run(RunArgs),
    /// Repeat runs over offset seeds (optionally several variants) and
    /// report mean +/- std of the headline accuracy.
    Sweep(SweepArgs),
    /// Run the built-in oracle and property suite.
    Selftest,
}

/// Flag set shared by `run` and `sweep`. Every flag overrides the config
/// file, which overrides the built-in defaults.
#[derive(Args)]
struct CommonArgs {
    /// Flat key=value config file applied before any flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Training variant (cls, cls_no_nl, cls_no_rw, cls_no_cross, fixmatch,
    /// fixmatch_nl, fixmatch_rw, fixmatch_nl_rw, supervised_only). For
    /// sweep, a comma-separated list.
    #[arg(long)]
    variant: Option<String>,
    /// Dataset: two_moons, blobs, or csv:<path>.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    n_labeled: Option<usize>,
    #[arg(long)]
    n_unlabeled: Option<usize>,
    #[arg(long)]
    n_test: Option<usize>,
    /// Noise std of the synthetic two-moons data.
    #[arg(long)]
    data_noise: Option<f64>,
    /// Cluster std of the synthetic blobs data.
    #[arg(long)]
    blob_std: Option<f64>,
    /// CSV input starts with a header row.
    #[arg(long)]
    csv_header: bool,
    /// Base learning rate.
    #[arg(long)]
    alpha: Option<f64>,
    /// Unlabeled-to-labeled batch ratio.
    #[arg(long)]
    mu: Option<usize>,
    /// Labeled batch size.
    #[arg(long)]
    batch: Option<usize>,
    /// Total training iterations.
    #[arg(long)]
    iters: Option<usize>,
    /// Label-exchange confidence threshold.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    lambda1: Option<f64>,
    #[arg(long)]
    lambda2: Option<f64>,
    /// Confidence threshold of the fixmatch-family gate.
    #[arg(long)]
    gamma: Option<f64>,
    /// Sharpening temperature.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    seed1: Option<u64>,
    #[arg(long)]
    seed2: Option<u64>,
    /// Seed of dataset synthesis, splitting, and batch sampling.
    #[arg(long)]
    data_seed: Option<u64>,
    /// Hidden layer widths, comma separated (e.g. 32,32).
    #[arg(long)]
    hidden: Option<String>,
    #[arg(long)]
    momentum: Option<f64>,
    #[arg(long)]
    weight_decay: Option<f64>,
    /// Weak noise as a multiple of the per-feature data std.
    #[arg(long)]
    weak_noise: Option<f64>,
    /// Strong noise as a multiple of the per-feature data std.
    #[arg(long)]
    strong_noise: Option<f64>,
    #[arg(long)]
    dropout_prob: Option<f64>,
    #[arg(long)]
    scale_jitter: Option<f64>,
    /// Augmentation of labeled samples: none or weak.
    #[arg(long)]
    labeled_aug: Option<String>,
    #[arg(long)]
    eval_every: Option<usize>,
    #[arg(long)]
    ema_decay: Option<f64>,
    /// Output directory for metrics.jsonl and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also emit curves.csv.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of runs per variant; run r offsets every seed by r.
    #[arg(long, default_value_t = 5)]
    runs: usize,
}

fn build_config(common: &CommonArgs) -> Result<(ExperimentConfig, Vec<Variant>), Error> {
    let mut cfg = match &common.config {
        Some(path) => load_config_file(path)?,
        None => ExperimentConfig::default(),
    };
    let mut variants = vec![cfg.train.variant];

    macro_rules! set {
        ($field:expr, $key:literal) => {
            if let Some(v) = &$field {
                apply_kv(&mut cfg, $key, &v.to_string())?;
            }
        };
    }
    if let Some(spec) = &common.variant {
        let parsed: Result<Vec<Variant>, Error> =
            spec.split(',').map(|s| s.trim().parse()).collect();
        variants = parsed?;
        if variants.is_empty() {
            return Err(Error::config("empty variant list"));
        }
        cfg.train.variant = variants[0];
    }
    set!(common.dataset, "dataset");
    set!(common.n_labeled, "n_labeled");
    set!(common.n_unlabeled, "n_unlabeled");
    set!(common.n_test, "n_test");
    set!(common.data_noise, "data_noise");
    set!(common.blob_std, "blob_std");
    if common.csv_header {
        apply_kv(&mut cfg, "csv_header", "true")?;
    }
    set!(common.alpha, "alpha");
    set!(common.mu, "mu");
    set!(common.batch, "batch");
    set!(common.iters, "iters");
    set!(common.tau, "tau");
    set!(common.lambda1, "lambda1");
    set!(common.lambda2, "lambda2");
    set!(common.gamma, "gamma");
    set!(common.epsilon, "epsilon");
    set!(common.seed1, "seed1");
    set!(common.seed2, "seed2");
    set!(common.data_seed, "data_seed");
    set!(common.hidden, "hidden");
    set!(common.momentum, "momentum");
    set!(common.weight_decay, "weight_decay");
    set!(common.weak_noise, "weak_noise");
    set!(common.strong_noise, "strong_noise");
    set!(common.dropout_prob, "dropout_prob");
    set!(common.scale_jitter, "scale_jitter");
    set!(common.labeled_aug, "labeled_aug");
    set!(common.eval_every, "eval_every");
    set!(common.ema_decay, "ema_decay");
    if let Some(out) = &common.out {
        cfg.out_dir = Some(out.clone());
    }
    if common.csv {
        cfg.emit_csv = true;
    }
    Ok((cfg, variants))
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Data(_) | Error::Shape(_) => 2,
        Error::Numeric(_) => 3,
        _ => 1,
    }
}

fn cmd_run(args: &RunArgs) -> Result<(), Error> {
    let (cfg, variants) = build_config(&args.common)?;
    if variants.len() > 1 {
        return Err(Error::config("run takes a single variant; use sweep for a list"));
    }
    let result = run_experiment(&cfg)?;
    print!("{}", format_summary_table(&result.summary));
    if let Some(dir) = &cfg.out_dir {
        println!("artifacts: {}", dir.display());
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Error> {
    let (cfg, variants) = build_config(&args.common)?;
    let report = sweep(&cfg, &variants, args.runs)?;
    print!("{}", format_sweep_table(&report));
    if let Some(dir) = &cfg.out_dir {
        println!("artifacts: {}", dir.display());
    }
    Ok(())
}

fn cmd_selftest() -> Result<(), Error> {
    let results = cls_core::selftest::run_all();
    let mut failed = 0usize;
    for r in &results {
        if r.passed {
            println!("ok   {}", r.name);
        } else {
            failed += 1;
            println!("FAIL {} — {}", r.name, r.detail);
        }
    }
    println!("selftest: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        return Err(Error::internal(format!("{failed} selftest checks failed")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Selftest => cmd_selftest(),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
