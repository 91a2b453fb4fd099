//! Category benchmark: binary inputs, three of which jointly set the label.
//! Ranks the true triple among all 120 triples for CENNET and the
//! local-linear baseline.
//!
//! ```text
//! cargo run --release --example category_experiment [score]
//! ```
//! `score` is `tep` (default), `oriented` or `magnitude`.

use cennet::datagen::SyntheticKind;
use cennet::harness::{render_text, run_experiment, CennetScore, DatasetConfig, EvalConfig, ExperimentConfig};
use cennet::explain::ExplainConfig;

fn main() -> cennet::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CENNET_LOG", "info")).init();
    let score = match std::env::args().nth(1).as_deref() {
        Some("oriented") => CennetScore::Oriented,
        Some("magnitude") => CennetScore::Magnitude,
        _ => CennetScore::Tep,
    };
    let cfg = ExperimentConfig {
        name: Some("category".into()),
        dataset: DatasetConfig {
            kind: Some(SyntheticKind::Category),
            network: None,
            bn_file: None,
            target: None,
            n: 10_000,
            seed: 42,
            n_features: None,
        },
        split_ratios: None,
        train: Default::default(),
        causal: Default::default(),
        explain: ExplainConfig {
            m: 3,
            ..ExplainConfig::default()
        },
        eval: EvalConfig {
            combo_size: Some(3),
            cennet_score: score,
            ..EvalConfig::default()
        },
    };
    let exp = run_experiment(&cfg)?;
    print!("{}", render_text(&exp.report));
    for (stage, secs) in &exp.timings.stages {
        println!("{stage:>10}: {secs:.2}s");
    }
    Ok(())
}
