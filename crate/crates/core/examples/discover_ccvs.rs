//! Finds the characteristic correlated variables of every NNLU neuron on
//! the nonlinear-additive data, where only X1..X4 carry signal.
//!
//! ```text
//! cargo run --release --example discover_ccvs
//! ```

use cennet::causal::global_explain;
use cennet::harness::{prepare_data, ExperimentConfig};
use cennet::mlp::train;

fn main() -> cennet::Result<()> {
    let cfg: ExperimentConfig =
        serde_json::from_str(r#"{"dataset": {"kind": "nonlinear-additive", "n": 10000, "seed": 42}}"#)?;
    let ds = prepare_data(&cfg)?.dataset;
    let model = train(&ds, &cfg.train)?;
    let report = global_explain(&model, &ds, cfg.causal)?;
    println!("alpha {}, max conditioning size {}, {} bins", report.alpha, report.max_cond, report.n_bins);
    for n in &report.neurons {
        let removed: Vec<String> = n
            .skeleton
            .sepsets
            .iter()
            .map(|(v, s)| format!("{v}|{s:?}"))
            .collect();
        println!(
            "{} (w = {:+.3}): CCV {:?} after {} tests; removed {}",
            n.name,
            n.weight,
            n.ccv,
            n.skeleton.n_tests,
            removed.join(" ")
        );
    }
    println!("union {:?}", report.ccv_union());
    Ok(())
}
