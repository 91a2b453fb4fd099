#![allow(dead_code)]

use cennet::causal::{global_explain, CausalReport};
use cennet::explain::{EepCache, ExplainConfig};
use cennet::harness::{prepare_data, ExperimentConfig};
use cennet::mlp::{train, MlpModel};
use cennet::store::TabularDataset;

pub struct Fitted {
    pub ds: TabularDataset,
    pub model: MlpModel,
    pub report: CausalReport,
    pub cache: EepCache,
    pub cfg: ExplainConfig,
}

/// Small category pipeline: data, a briefly trained model, CCVs and a cache.
pub fn fitted(m: usize) -> Fitted {
    let exp: ExperimentConfig = serde_json::from_str(&format!(
        r#"{{"dataset": {{"kind": "category", "n": 3000, "seed": 11}}, "train": {{"epochs": 8}}, "explain": {{"m": {m}}}}}"#
    ))
    .unwrap();
    let ds = prepare_data(&exp).unwrap().dataset;
    let model = train(&ds, &exp.train).unwrap();
    let report = global_explain(&model, &ds, exp.causal).unwrap();
    let cache = EepCache::build(&model, &report, &ds, &exp.explain).unwrap();
    Fitted {
        ds,
        model,
        report,
        cache,
        cfg: exp.explain,
    }
}
