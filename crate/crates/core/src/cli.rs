//! The `cennet` command line: argument grammar, dispatch, run manifests and
//! exit codes.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or parse error, 3 numeric
//! failure (diverged training, undefined probability).

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::causal::{global_explain, CausalConfig, CausalReport};
use crate::datagen::{build_candidates, builtin_network, generate, parse_bn, sample_bn, SyntheticKind, SyntheticSpec};
use crate::error::{invalid_arg, Error, ErrorClass, Result};
use crate::explain::{explain_rows, EepCache, ExplainConfig};
use crate::harness::{render_text, run_experiment, write_report, ExperimentConfig, REPORT_JSON};
use crate::mlp::{train, MlpModel, TrainConfig};
use crate::store::io::{read_dataset, read_json, write_dataset, write_json, DataSource, DatasetMeta};
use crate::store::{split, SplitRatios, SplitTag};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(name = "cennet", version, about = "Causal explanations for neural-network predictors")]
pub struct Cli {
    /// Worker threads for discover, explain and evaluate (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic benchmark dataset.
    Generate(GenerateArgs),
    /// Sample a dataset from a Bayesian network.
    SampleBn(SampleBnArgs),
    /// Train the classifier.
    Train(TrainArgs),
    /// Find the characteristic correlated variables of every NNLU neuron.
    Discover(DiscoverArgs),
    /// Rank explanations for individual rows.
    Explain(ExplainArgs),
    /// Run a full experiment from a config file.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// nonlinear-additive, nonlinear-nonadditive or category.
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Number of input variables.
    #[arg(long, default_value_t = 10)]
    pub features: usize,
    /// Train:validation:test ratios.
    #[arg(long, default_value = "80:10:10")]
    pub split: String,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SampleBnArgs {
    /// Network file.
    #[arg(long, conflicts_with = "network", required_unless_present = "network")]
    pub model: Option<PathBuf>,
    /// Shipped network: alarm, hailfinder or insurance.
    #[arg(long)]
    pub network: Option<String>,
    /// Binary variable to predict.
    #[arg(long)]
    pub target: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "90:5:5")]
    pub split: String,
    /// Keep every network variable instead of only the target's candidates.
    #[arg(long)]
    pub all_vars: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset directory.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 64)]
    pub batch: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    /// Hidden layer widths; the last is the NNLU.
    #[arg(long, value_delimiter = ',', default_value = "16,5")]
    pub hidden: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct DiscoverArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long, default_value_t = 3)]
    pub max_cond: usize,
    /// Equal-frequency bins for numeric inputs and neurons.
    #[arg(long, default_value_t = 3)]
    pub bins: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Causal report written by `discover`.
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// train, val, test, all, or comma-separated row indices.
    #[arg(long, default_value = "test")]
    pub rows: String,
    /// Explain at most this many of the selected rows.
    #[arg(long)]
    pub limit: Option<usize>,
    /// Largest configuration size.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 1.0)]
    pub smoothing: f64,
    /// Keep each neuron's top-K CCV subsets by expected EEP.
    #[arg(long)]
    pub emi_topk: Option<usize>,
    /// Keep only the best K explanations per row.
    #[arg(long)]
    pub top: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for report.json, report.txt and timings.json.
    #[arg(long)]
    pub out: PathBuf,
    /// Override the config's CENNET ranking score: tep, oriented or magnitude.
    #[arg(long)]
    pub score: Option<String>,
}

/// Record of one invocation, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub exit_code: i32,
    pub config: Value,
    pub seeds: Value,
    pub artifacts: Vec<PathBuf>,
    pub versions: Value,
    /// Seconds since the Unix epoch.
    pub started: f64,
    pub finished: f64,
}

fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Where the manifest of a run writing to `out` goes: inside an output
/// directory, or beside an output file as `<stem>.manifest.json`.
pub fn manifest_path(out: &Path, out_is_dir: bool) -> PathBuf {
    if out_is_dir {
        return out.join(MANIFEST_FILE);
    }
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
    out.with_file_name(format!("{stem}.manifest.json"))
}

pub fn exit_code(class: ErrorClass) -> i32 {
    match class {
        ErrorClass::Usage => 1,
        ErrorClass::Data => 2,
        ErrorClass::Numeric => 3,
    }
}

/// What a finished subcommand reports for its manifest.
struct Outcome {
    config: Value,
    seeds: Value,
    artifacts: Vec<PathBuf>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::SampleBn(_) => "sample-bn",
            Command::Train(_) => "train",
            Command::Discover(_) => "discover",
            Command::Explain(_) => "explain",
            Command::Evaluate(_) => "evaluate",
        }
    }

    fn output(&self) -> (&Path, bool) {
        match self {
            Command::Generate(a) => (&a.out, true),
            Command::SampleBn(a) => (&a.out, true),
            Command::Train(a) => (&a.out, false),
            Command::Discover(a) => (&a.out, false),
            Command::Explain(a) => (&a.out, false),
            Command::Evaluate(a) => (&a.out, true),
        }
    }
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    run(cli)
}

pub fn run(cli: Cli) -> i32 {
    let started = now();
    let result = match cli.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start {n} workers: {e}")))
            .and_then(|pool| pool.install(|| execute(&cli.command))),
        None => execute(&cli.command),
    };
    let (out, is_dir) = cli.command.output();
    let (code, outcome, error) = match result {
        Ok(o) => (0, Some(o), None),
        Err(e) => {
            eprintln!("error: {e}");
            (exit_code(e.class()), None, Some(e.to_string()))
        }
    };
    let (config, seeds, artifacts) = match outcome {
        Some(o) => (o.config, o.seeds, o.artifacts),
        None => (Value::Null, Value::Null, Vec::new()),
    };
    let manifest = RunManifest {
        subcommand: cli.command.name().to_string(),
        status: if code == 0 { "ok" } else { "failed" }.to_string(),
        error,
        exit_code: code,
        config,
        seeds,
        artifacts,
        versions: json!({ "cennet": env!("CARGO_PKG_VERSION") }),
        started,
        finished: now(),
    };
    let path = manifest_path(out, is_dir);
    let written = path
        .parent()
        .map_or(Ok(()), std::fs::create_dir_all)
        .map_err(|e| Error::io(&path, e))
        .and_then(|_| write_json(&path, &manifest));
    if let Err(e) = written {
        log::warn!("could not write manifest: {e}");
    }
    code
}

fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Generate(a) => cmd_generate(a),
        Command::SampleBn(a) => cmd_sample_bn(a),
        Command::Train(a) => cmd_train(a),
        Command::Discover(a) => cmd_discover(a),
        Command::Explain(a) => cmd_explain(a),
        Command::Evaluate(a) => cmd_evaluate(a),
    }
}

fn cmd_generate(a: &GenerateArgs) -> Result<Outcome> {
    let kind = SyntheticKind::parse(&a.kind)?;
    let ratios = SplitRatios::parse(&a.split)?;
    let spec = SyntheticSpec {
        kind,
        n_samples: a.n,
        seed: a.seed,
        n_features: a.features,
    };
    let g = generate(&spec)?;
    let ds = split(&g.dataset, ratios, a.seed)?;
    let meta = DatasetMeta::describe(
        &ds,
        DataSource::Synthetic {
            kind,
            seed: a.seed,
            n_features: a.features,
        },
        g.centering,
        ratios,
        a.seed,
        g.ground_truth,
    );
    write_dataset(&a.out, &ds, &meta)?;
    log::info!("wrote {} rows to {}", ds.n_rows(), a.out.display());
    Ok(Outcome {
        config: json!({ "kind": kind, "n": a.n, "features": a.features, "split": ratios }),
        seeds: json!({ "data": a.seed, "split": a.seed }),
        artifacts: dataset_files(&a.out),
    })
}

fn dataset_files(dir: &Path) -> Vec<PathBuf> {
    vec![
        dir.join(crate::store::io::DATA_FILE),
        dir.join(crate::store::io::META_FILE),
    ]
}

fn cmd_sample_bn(a: &SampleBnArgs) -> Result<Outcome> {
    let ratios = SplitRatios::parse(&a.split)?;
    let (bn, network) = match (&a.model, &a.network) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let bn = parse_bn(&text).map_err(|e| match e {
                Error::Parse { .. } => Error::InvalidData(format!("{}: {e}", path.display())),
                other => other,
            })?;
            (bn, path.display().to_string())
        }
        (None, Some(name)) => (builtin_network(name)?, name.clone()),
        (None, None) => return invalid_arg("either --model or --network is required"),
    };
    let gt = build_candidates(&bn, &a.target)?;
    let mut ds = sample_bn(&bn, a.n, a.seed, &a.target)?;
    if !a.all_vars {
        ds = ds.project(&gt.candidate_vars)?;
    }
    let ds = split(&ds, ratios, a.seed)?;
    let meta = DatasetMeta::describe(
        &ds,
        DataSource::BayesNet {
            network: network.clone(),
            seed: a.seed,
        },
        None,
        ratios,
        a.seed,
        gt,
    );
    write_dataset(&a.out, &ds, &meta)?;
    log::info!("wrote {} rows to {}", ds.n_rows(), a.out.display());
    Ok(Outcome {
        config: json!({
            "network": network,
            "target": a.target,
            "n": a.n,
            "split": ratios,
            "all_vars": a.all_vars,
        }),
        seeds: json!({ "data": a.seed, "split": a.seed }),
        artifacts: dataset_files(&a.out),
    })
}

fn cmd_train(a: &TrainArgs) -> Result<Outcome> {
    let cfg = TrainConfig {
        epochs: a.epochs,
        batch_size: a.batch,
        learning_rate: a.lr,
        seed: a.seed,
        hidden: a.hidden.clone(),
    };
    cfg.validate()?;
    let (ds, _) = read_dataset(&a.data)?;
    let model = train(&ds, &cfg)?;
    let text = model.to_json()?;
    std::fs::write(&a.out, text).map_err(|e| Error::io(&a.out, e))?;
    if let Some(s) = model.selection {
        log::info!("best epoch {} with validation PR-AUC {:.4}", s.best_epoch, s.val_pr_auc);
    }
    Ok(Outcome {
        config: serde_json::to_value(&cfg)?,
        seeds: json!({ "train": a.seed }),
        artifacts: vec![a.out.clone()],
    })
}

fn load_model(path: &Path) -> Result<MlpModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    MlpModel::from_json(&text)
}

fn cmd_discover(a: &DiscoverArgs) -> Result<Outcome> {
    let model = load_model(&a.model)?;
    let (ds, _) = read_dataset(&a.data)?;
    let cfg = CausalConfig {
        alpha: a.alpha,
        max_cond: a.max_cond,
        n_bins: a.bins,
    };
    let report = global_explain(&model, &ds, cfg)?;
    for n in &report.neurons {
        log::info!("CCV({}) = {:?}", n.name, n.ccv);
    }
    write_json(&a.out, &report)?;
    Ok(Outcome {
        config: serde_json::to_value(cfg)?,
        seeds: Value::Null,
        artifacts: vec![a.out.clone()],
    })
}

/// Resolves `--rows`.
fn select_rows(spec: &str, ds: &crate::store::TabularDataset) -> Result<Vec<usize>> {
    match spec {
        "all" => Ok((0..ds.n_rows()).collect()),
        "train" | "val" | "test" => Ok(ds.rows(SplitTag::parse(spec)?)),
        list => list
            .split(',')
            .map(|s| {
                let r: usize = s
                    .trim()
                    .parse()
                    .or_else(|_| invalid_arg(format!("bad row index `{s}`")))?;
                if r >= ds.n_rows() {
                    return invalid_arg(format!("row {r} out of range (dataset has {} rows)", ds.n_rows()));
                }
                Ok(r)
            })
            .collect(),
    }
}

fn cmd_explain(a: &ExplainArgs) -> Result<Outcome> {
    let model = load_model(&a.model)?;
    let report: CausalReport = read_json(&a.report)?;
    let (ds, _) = read_dataset(&a.data)?;
    let cfg = ExplainConfig {
        m: a.m,
        smoothing: a.smoothing,
        emi_topk: a.emi_topk,
    };
    let mut rows = select_rows(&a.rows, &ds)?;
    if let Some(k) = a.limit {
        rows.truncate(k);
    }
    let cache = EepCache::build(&model, &report, &ds, &cfg)?;
    let mut lists = explain_rows(&model, &report, &cache, &ds, &rows, &cfg)?;
    if let Some(k) = a.top {
        lists.iter_mut().for_each(|l| l.explanations.truncate(k));
    }
    write_json(&a.out, &lists)?;
    log::info!("explained {} rows", lists.len());
    Ok(Outcome {
        config: json!({ "rows": a.rows, "limit": a.limit, "top": a.top, "explain": cfg }),
        seeds: Value::Null,
        artifacts: vec![a.out.clone()],
    })
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<Outcome> {
    let mut cfg = ExperimentConfig::from_file(&a.config)?;
    if let Some(s) = &a.score {
        cfg.eval.cennet_score = serde_json::from_value(Value::String(s.clone()))
            .or_else(|_| invalid_arg(format!("unknown score `{s}` (tep|oriented|magnitude)")))?;
    }
    let exp = run_experiment(&cfg)?;
    write_report(&a.out, &exp)?;
    print!("{}", render_text(&exp.report));
    let seeds = json!({
        "data": cfg.dataset.seed,
        "train": cfg.train.seed,
        "baseline": cfg.eval.baseline.map(|b| b.seed),
    });
    Ok(Outcome {
        config: serde_json::to_value(&cfg)?,
        seeds,
        artifacts: [REPORT_JSON, crate::harness::REPORT_TEXT, crate::harness::TIMINGS_JSON]
            .iter()
            .map(|f| a.out.join(f))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn manifest_location() {
        assert_eq!(manifest_path(Path::new("d"), true), Path::new("d/manifest.json"));
        assert_eq!(
            manifest_path(Path::new("x/model.json"), false),
            Path::new("x/model.manifest.json")
        );
    }

    #[test]
    fn exit_codes_by_class() {
        assert_eq!(exit_code(ErrorClass::Usage), 1);
        assert_eq!(exit_code(ErrorClass::Data), 2);
        assert_eq!(exit_code(ErrorClass::Numeric), 3);
        assert_eq!(dispatch(["cennet", "generate", "--bogus"]), 1);
    }
}
