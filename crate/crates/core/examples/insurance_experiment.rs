//! Insurance benchmark: ranks the target's parents among the candidate
//! variables on 500 test rows for CENNET and the local-linear baseline.
//!
//! ```text
//! cargo run --release --example insurance_experiment [target]
//! ```
//! `target` defaults to `Airbag`; `OtherCar`, `Antilock` and `VehicleYear`
//! are the other binary targets used in the configs.

use cennet::harness::{render_text, run_experiment, ExperimentConfig};

fn main() -> cennet::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CENNET_LOG", "info")).init();
    let target = std::env::args().nth(1).unwrap_or_else(|| "Airbag".into());
    let cfg: ExperimentConfig = serde_json::from_value(serde_json::json!({
        "name": format!("insurance-{target}"),
        "dataset": {"network": "insurance", "target": target, "n": 10000, "seed": 42},
        "split_ratios": "90:5:5",
        "explain": {"m": 1},
        "eval": {"max_test_rows": 500}
    }))?;
    let exp = run_experiment(&cfg)?;
    print!("{}", render_text(&exp.report));
    Ok(())
}
