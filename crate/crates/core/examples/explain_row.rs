//! Explains one test row of the category data: ranked configurations with
//! their PEP, NEP and per-neuron contributions.
//!
//! ```text
//! cargo run --release --example explain_row [row-offset]
//! ```

use cennet::causal::global_explain;
use cennet::explain::{explain_rows, EepCache};
use cennet::harness::{prepare_data, ExperimentConfig};
use cennet::mlp::train;
use cennet::store::SplitTag;

fn main() -> cennet::Result<()> {
    let k: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let cfg: ExperimentConfig =
        serde_json::from_str(r#"{"dataset": {"kind": "category", "n": 10000, "seed": 42}, "explain": {"m": 3}}"#)?;
    let ds = prepare_data(&cfg)?.dataset;
    let model = train(&ds, &cfg.train)?;
    let report = global_explain(&model, &ds, cfg.causal)?;
    let cache = EepCache::build(&model, &report, &ds, &cfg.explain)?;

    let row = ds.rows(SplitTag::Test)[k];
    let values: Vec<String> = ds.columns().iter().map(|c| format!("{}={}", c.name, c.cell_text(row))).collect();
    println!("row {row}: {}", values.join(" "));
    let list = &explain_rows(&model, &report, &cache, &ds, &[row], &cfg.explain)?[0];
    println!("P(Y=1) = {:.3}, {} configurations scored", list.probability, list.explanations.len());
    for e in list.explanations.iter().take(8) {
        let cfg: Vec<String> = e.config.iter().map(|c| format!("{}={}", c.variable, c.value)).collect();
        println!("  TEP {:+.4}  PEP {:+.4}  NEP {:+.4}  {}", e.tep, e.pep, e.nep, cfg.join(", "));
        for c in e.contributions.iter().filter(|c| c.contribution != 0.0) {
            println!("      n{}: w*n = {:+.3}, EEP {:+.4}", c.neuron + 1, c.weighted_activation, c.eep);
        }
    }
    Ok(())
}
