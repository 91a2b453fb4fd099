use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{baseline_local_linear, mcnemar, rank_combo, rank_single, welch_t, BaselineConfig, RankResult, WelchResult};
use crate::causal::{global_explain, CausalConfig, CausalReport};
use crate::datagen::{
    build_candidates, builtin_network, generate, parse_bn, sample_bn, GroundTruth, SyntheticKind, SyntheticSpec,
};
use crate::error::{invalid_arg, Error, Result};
use crate::explain::{subsets_up_to, tep_score, EepCache, ExplainConfig, RowContext};
use crate::mlp::{pr_auc, train, MlpModel, TrainConfig};
use crate::store::{split, io::write_json, SplitRatios, SplitTag, TabularDataset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    /// Synthetic benchmark kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<SyntheticKind>,
    /// Name of a shipped network (`alarm`, `hailfinder`, `insurance`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<String>,
    /// Network file; relative paths resolve against the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bn_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub n: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_features: Option<usize>,
}

fn default_seed() -> u64 {
    42
}

/// How CENNET's TEP becomes a ranking score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CennetScore {
    /// TEP as is.
    #[default]
    Tep,
    /// `(TEP − 2b)` signed towards the predicted class, so configurations
    /// that explain a negative prediction also rank high.
    Oriented,
    /// `(PEP − b) − (NEP − b)`: explanation power on both sides, ignoring
    /// which way it pushes the prediction.
    Magnitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// Also rank important sets among all subsets of this size.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub combo_size: Option<usize>,
    /// Run the local-linear baseline with these settings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<BaselineConfig>,
    /// Explain at most this many test rows (first in row order).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_test_rows: Option<usize>,
    pub cennet_score: CennetScore,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            combo_size: None,
            baseline: Some(BaselineConfig::default()),
            max_test_rows: None,
            cennet_score: CennetScore::Tep,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatioSpec {
    Text(String),
    Values([f64; 3]),
}

impl RatioSpec {
    pub fn resolve(&self) -> Result<SplitRatios> {
        match self {
            RatioSpec::Text(s) => SplitRatios::parse(s),
            RatioSpec::Values(v) => {
                let r = SplitRatios(*v);
                r.validate()?;
                Ok(r)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dataset: DatasetConfig,
    /// Defaults to 80:10:10 for synthetic data and 90:5:5 for networks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_ratios: Option<RatioSpec>,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub causal: CausalConfig,
    #[serde(default)]
    pub explain: ExplainConfig,
    #[serde(default)]
    pub eval: EvalConfig,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text)?;
        if let Some(f) = &cfg.dataset.bn_file {
            if f.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.dataset.bn_file = Some(base.join(f));
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.dataset;
        let sources = usize::from(d.kind.is_some()) + usize::from(d.network.is_some()) + usize::from(d.bn_file.is_some());
        if sources != 1 {
            return invalid_arg("dataset needs exactly one of `kind`, `network` or `bn_file`");
        }
        if d.kind.is_none() && d.target.is_none() {
            return invalid_arg("network datasets need a `target`");
        }
        if let Some(k) = self.eval.combo_size {
            if k == 0 || k > self.explain.m {
                return invalid_arg(format!(
                    "eval.combo_size {k} must be between 1 and explain.m ({})",
                    self.explain.m
                ));
            }
        }
        self.train.validate()?;
        self.explain.validate()?;
        if let Some(b) = &self.eval.baseline {
            b.validate()?;
        }
        Ok(())
    }

    fn ratios(&self) -> Result<SplitRatios> {
        match &self.split_ratios {
            Some(r) => r.resolve(),
            None if self.dataset.kind.is_some() => Ok(SplitRatios::SYNTHETIC),
            None => Ok(SplitRatios::QUASI_REAL),
        }
    }
}

/// Dataset, ground truth and split produced by the first two stages.
pub struct PreparedData {
    pub dataset: TabularDataset,
    pub ground_truth: GroundTruth,
    pub source: String,
}

/// Generates (or samples) and splits the configured dataset. Network data
/// keeps only the candidate variables and the target.
pub fn prepare_data(cfg: &ExperimentConfig) -> Result<PreparedData> {
    let d = &cfg.dataset;
    let (ds, gt, source) = if let Some(kind) = d.kind {
        let mut spec = SyntheticSpec::new(kind, d.n, d.seed);
        if let Some(f) = d.n_features {
            spec.n_features = f;
        }
        let g = generate(&spec)?;
        (g.dataset, g.ground_truth, kind.as_str().to_string())
    } else {
        let (bn, source) = match (&d.network, &d.bn_file) {
            (Some(name), _) => (builtin_network(name)?, name.clone()),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                (parse_bn(&text)?, path.display().to_string())
            }
            (None, None) => return invalid_arg("no dataset source"),
        };
        let target = d.target.as_deref().expect("validated");
        let gt = build_candidates(&bn, target)?;
        let ds = sample_bn(&bn, d.n, d.seed, target)?.project(&gt.candidate_vars)?;
        (ds, gt, format!("{source}:{target}"))
    };
    let ds = split(&ds, cfg.ratios()?, d.seed)?;
    Ok(PreparedData {
        dataset: ds,
        ground_truth: gt,
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSummary {
    pub source: String,
    pub n_rows: usize,
    pub split_counts: [usize; 3],
    pub target: String,
    pub candidates: Vec<String>,
    pub important: Vec<Vec<String>>,
    pub explained_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub architecture: Vec<usize>,
    pub best_epoch: usize,
    pub val_pr_auc: f64,
    pub test_pr_auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub name: String,
    pub single: RankResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub combo: Option<RankResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub welch_single: WelchResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub welch_combo: Option<WelchResult>,
    /// Rows where only CENNET / only the baseline has a top-1 hit.
    pub top1_cennet_only: u64,
    pub top1_baseline_only: u64,
    pub mcnemar_p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub config: ExperimentConfig,
    pub data: DataSummary,
    pub model: ModelSummary,
    pub ccv: Vec<Vec<String>>,
    pub methods: Vec<MethodReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
}

/// Wall-clock seconds per stage; kept apart from the report so that the
/// report itself is reproducible byte for byte.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub stages: BTreeMap<String, f64>,
    pub explained_rows: usize,
}

pub struct Experiment {
    pub report: ExperimentReport,
    pub timings: Timings,
    pub model: MlpModel,
    pub causal: CausalReport,
}

struct Stopwatch<'a> {
    timings: &'a mut Timings,
}

impl Stopwatch<'_> {
    fn run<T>(&mut self, stage: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t0 = Instant::now();
        log::info!("stage {stage}");
        let out = f().map_err(|e| e.at_stage(stage))?;
        self.timings
            .stages
            .insert(stage.to_string(), t0.elapsed().as_secs_f64());
        Ok(out)
    }
}

/// Per-row scores over singletons and (optionally) fixed-size subsets.
struct MethodScores {
    single: Vec<Vec<f64>>,
    combo: Option<Vec<Vec<f64>>>,
}

fn cennet_scores(
    cache: &EepCache,
    ctx: &[RowContext],
    n_inputs: usize,
    combos: Option<&[Vec<usize>]>,
    mode: CennetScore,
) -> Result<MethodScores> {
    let score = |c: &RowContext, vars: &[usize]| -> Result<f64> {
        let parts = tep_score(cache, c, vars)?;
        let tep = parts.tep();
        Ok(match mode {
            CennetScore::Tep => tep,
            CennetScore::Magnitude => parts.pep - parts.nep,
            CennetScore::Oriented => {
                let centered = tep - 2.0 * c.view.bias;
                if c.view.logit >= 0.0 {
                    centered
                } else {
                    -centered
                }
            }
        })
    };
    let single = ctx
        .par_iter()
        .map(|c| (0..n_inputs).map(|v| score(c, &[v])).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let combo = combos
        .map(|subs| {
            ctx.par_iter()
                .map(|c| subs.iter().map(|s| score(c, s)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    Ok(MethodScores { single, combo })
}

fn baseline_scores(
    model: &MlpModel,
    ds: &TabularDataset,
    rows: &[usize],
    combos: Option<&[Vec<usize>]>,
    cfg: &BaselineConfig,
) -> Result<MethodScores> {
    let xs = model.encoder.encode(ds)?;
    let w = model.input_width();
    let f = |z: &[f64]| model.predict_proba(z).expect("width checked");
    let single = rows
        .par_iter()
        .map(|&r| baseline_local_linear(f, &model.encoder, &xs[r * w..(r + 1) * w], cfg, r as u64))
        .collect::<Result<Vec<_>>>()?;
    let combo = combos.map(|subs| {
        single
            .iter()
            .map(|imp| subs.iter().map(|s| s.iter().map(|&v| imp[v]).sum()).collect())
            .collect()
    });
    Ok(MethodScores { single, combo })
}

fn top1_hits(r: &RankResult, combo: bool, important: &[Vec<String>]) -> Vec<bool> {
    r.ranks
        .iter()
        .zip(important)
        .map(|(&rank, imp)| {
            if combo {
                rank == 1.0
            } else {
                // All important variables occupy the first |imp| places.
                rank <= (imp.len() as f64 + 1.0) / 2.0
            }
        })
        .collect()
}

/// Runs every stage for one configuration.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Experiment> {
    cfg.validate()?;
    let mut timings = Timings::default();
    let mut sw = Stopwatch { timings: &mut timings };
    let data = sw.run("generate", || prepare_data(cfg))?;
    let ds = &data.dataset;
    let model = sw.run("train", || train(ds, &cfg.train))?;
    let causal = sw.run("discover", || global_explain(&model, ds, cfg.causal))?;
    let cache = sw.run("cache", || EepCache::build(&model, &causal, ds, &cfg.explain))?;

    let mut test_rows = ds.rows(SplitTag::Test);
    if let Some(k) = cfg.eval.max_test_rows {
        test_rows.truncate(k);
    }
    if test_rows.is_empty() {
        return Err(Error::InvalidData("no test rows to explain".into()).at_stage("explain"));
    }
    let candidates = causal.inputs.clone();
    let index_of = |name: &String| candidates.iter().position(|c| c == name).ok_or_else(|| Error::UnknownVariable(name.clone()));
    let combos: Option<Vec<Vec<usize>>> = cfg.eval.combo_size.map(|k| {
        subsets_up_to(&(0..candidates.len()).collect::<Vec<_>>(), k)
            .into_iter()
            .filter(|s| s.len() == k)
            .collect()
    });
    let combo_names: Option<Vec<Vec<String>>> = combos
        .as_ref()
        .map(|c| c.iter().map(|s| s.iter().map(|&v| candidates[v].clone()).collect()).collect());
    let important: Vec<Vec<String>> = test_rows
        .iter()
        .map(|&r| data.ground_truth.important_for_row(r))
        .collect();
    for imp in &important {
        for v in imp {
            index_of(v)?;
        }
    }

    let cennet = sw.run("explain", || {
        let ctx = EepCache::contexts(&model, &causal, ds, &test_rows)?;
        cennet_scores(&cache, &ctx, candidates.len(), combos.as_deref(), cfg.eval.cennet_score)
    })?;
    let baseline = match &cfg.eval.baseline {
        Some(b) => Some(sw.run("baseline", || baseline_scores(&model, ds, &test_rows, combos.as_deref(), b))?),
        None => None,
    };

    let rank = |s: &MethodScores, name: &str| -> Result<MethodReport> {
        let single = rank_single(&s.single, &candidates, &important)?;
        let combo = match (&s.combo, &combo_names) {
            (Some(c), Some(names)) => Some(rank_combo(c, names, &important)?),
            _ => None,
        };
        Ok(MethodReport {
            name: name.to_string(),
            single,
            combo,
        })
    };
    let mut methods = vec![rank(&cennet, "cennet").map_err(|e| e.at_stage("rank"))?];
    if let Some(b) = &baseline {
        methods.push(rank(b, "local-linear").map_err(|e| e.at_stage("rank"))?);
    }
    let comparison = if methods.len() == 2 {
        let (a, b) = (&methods[0], &methods[1]);
        let welch_single = welch_t(&a.single.ranks, &b.single.ranks).map_err(|e| e.at_stage("rank"))?;
        let welch_combo = match (&a.combo, &b.combo) {
            (Some(x), Some(y)) => Some(welch_t(&x.ranks, &y.ranks).map_err(|e| e.at_stage("rank"))?),
            _ => None,
        };
        let (ra, rb, is_combo) = match (&a.combo, &b.combo) {
            (Some(x), Some(y)) => (x, y, true),
            _ => (&a.single, &b.single, false),
        };
        let ha = top1_hits(ra, is_combo, &important);
        let hb = top1_hits(rb, is_combo, &important);
        let b01 = ha.iter().zip(&hb).filter(|(x, y)| **x && !**y).count() as u64;
        let b10 = ha.iter().zip(&hb).filter(|(x, y)| !**x && **y).count() as u64;
        Some(Comparison {
            welch_single,
            welch_combo,
            top1_cennet_only: b01,
            top1_baseline_only: b10,
            mcnemar_p: mcnemar(b01, b10),
        })
    } else {
        None
    };

    let test_all = ds.rows(SplitTag::Test);
    let labels = ds.labels();
    let test_pr_auc = {
        let xs = model.encoder.encode(ds)?;
        let w = model.input_width();
        let scores = test_all
            .iter()
            .map(|&r| model.logit(&xs[r * w..(r + 1) * w]))
            .collect::<Result<Vec<_>>>()?;
        let y: Vec<u8> = test_all.iter().map(|&r| labels[r]).collect();
        pr_auc(&scores, &y).ok()
    };
    let selection = model.selection.expect("trained model records its selection");
    let (a, b, c) = ds.split_counts();
    timings.explained_rows = test_rows.len();
    let report = ExperimentReport {
        name: cfg.name.clone().unwrap_or_else(|| data.source.clone()),
        config: cfg.clone(),
        data: DataSummary {
            source: data.source.clone(),
            n_rows: ds.n_rows(),
            split_counts: [a, b, c],
            target: ds.target_name().to_string(),
            candidates: candidates.clone(),
            important: data.ground_truth.important_sets.clone(),
            explained_rows: test_rows.len(),
        },
        model: ModelSummary {
            architecture: model.architecture.clone(),
            best_epoch: selection.best_epoch,
            val_pr_auc: selection.val_pr_auc,
            test_pr_auc,
        },
        ccv: causal.ccv_sets(),
        methods,
        comparison,
    };
    Ok(Experiment {
        report,
        timings,
        model,
        causal,
    })
}

/// Plain-text summary table.
pub fn render_text(r: &ExperimentReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "experiment: {}", r.name);
    let _ = writeln!(
        s,
        "data: {} rows (train/val/test {}/{}/{}), target {}, {} candidates, {} rows explained",
        r.data.n_rows,
        r.data.split_counts[0],
        r.data.split_counts[1],
        r.data.split_counts[2],
        r.data.target,
        r.data.candidates.len(),
        r.data.explained_rows
    );
    let _ = writeln!(
        s,
        "model: {:?}, epoch {}, val PR-AUC {:.4}{}",
        r.model.architecture,
        r.model.best_epoch,
        r.model.val_pr_auc,
        r.model
            .test_pr_auc
            .map(|v| format!(", test PR-AUC {v:.4}"))
            .unwrap_or_default()
    );
    for (i, c) in r.ccv.iter().enumerate() {
        let _ = writeln!(s, "CCV(n{}) = {{{}}}", i + 1, c.join(", "));
    }
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:<14} {:>7} {:>16} {:>7} {:>7}",
        "method", "level", "mean rank", "top1", "top5"
    );
    for m in &r.methods {
        let mut row = |level: &str, x: &RankResult| {
            let _ = writeln!(
                s,
                "{:<14} {:>7} {:>16} {:>7.3} {:>7.3}",
                m.name,
                level,
                format!("{:.2} ± {:.2}", x.mean, x.std),
                x.top1,
                x.top5
            );
        };
        row("single", &m.single);
        if let Some(c) = &m.combo {
            row(&format!("size {}", r.config.eval.combo_size.unwrap_or(0)), c);
        }
    }
    if let Some(c) = &r.comparison {
        let _ = writeln!(s);
        let _ = writeln!(s, "Welch t (single ranks): t = {:.3}, p = {:.3e}", c.welch_single.t, c.welch_single.p_value);
        if let Some(w) = &c.welch_combo {
            let _ = writeln!(s, "Welch t (set ranks): t = {:.3}, p = {:.3e}", w.t, w.p_value);
        }
        let _ = writeln!(
            s,
            "McNemar on top-1 hits: {} vs {}, p = {:.3e}",
            c.top1_cennet_only, c.top1_baseline_only, c.mcnemar_p
        );
    }
    s
}

pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TEXT: &str = "report.txt";
pub const TIMINGS_JSON: &str = "timings.json";

/// Writes `report.json`, `report.txt` and `timings.json` into `dir`.
pub fn write_report(dir: &Path, exp: &Experiment) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_json(&dir.join(REPORT_JSON), &exp.report)?;
    let txt = dir.join(REPORT_TEXT);
    std::fs::write(&txt, render_text(&exp.report)).map_err(|e| Error::io(&txt, e))?;
    write_json(&dir.join(TIMINGS_JSON), &exp.timings)
}
