use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{extract_ccv, skeleton_search, Skeleton, SkeletonConfig};
use crate::error::{Error, Result};
use crate::mlp::MlpModel;
use crate::store::{Discretizer, NumericBins, SplitTag, TabularDataset, DEFAULT_BINS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CausalConfig {
    pub alpha: f64,
    pub max_cond: usize,
    pub n_bins: usize,
}

impl Default for CausalConfig {
    fn default() -> Self {
        CausalConfig {
            alpha: 0.01,
            max_cond: 3,
            n_bins: DEFAULT_BINS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuronReport {
    pub index: usize,
    pub name: String,
    /// Output-layer weight of the neuron.
    pub weight: f64,
    /// Bins of the neuron's training activations.
    pub bins: NumericBins,
    pub ccv: Vec<String>,
    pub skeleton: Skeleton,
}

/// Result of the global phase: one CCV set per NNLU neuron, plus the
/// discretization needed to reuse them on new rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalReport {
    pub alpha: f64,
    pub max_cond: usize,
    pub n_bins: usize,
    pub target: String,
    pub inputs: Vec<String>,
    pub discretizer: Discretizer,
    pub neurons: Vec<NeuronReport>,
}

impl CausalReport {
    /// Union of all CCV sets, in input order.
    pub fn ccv_union(&self) -> Vec<String> {
        self.inputs
            .iter()
            .filter(|x| self.neurons.iter().any(|n| n.ccv.contains(x)))
            .cloned()
            .collect()
    }

    pub fn ccv_sets(&self) -> Vec<Vec<String>> {
        self.neurons.iter().map(|n| n.ccv.clone()).collect()
    }
}

fn neuron_name(i: usize, taken: &[String]) -> String {
    let mut name = format!("n{}", i + 1);
    while taken.contains(&name) {
        name.insert(0, '_');
    }
    name
}

/// Runs the target-restricted skeleton search for every NNLU neuron on the
/// training rows. Neurons are analyzed in parallel; results come back in
/// neuron order.
pub fn global_explain(model: &MlpModel, ds: &TabularDataset, cfg: CausalConfig) -> Result<CausalReport> {
    let discretizer = Discretizer::fit(ds, cfg.n_bins)?;
    let train = ds.rows(SplitTag::Train);
    let table = discretizer.discretize(ds)?.select_rows(&train);
    let inputs = ds.feature_names();
    let candidates: Vec<usize> = inputs
        .iter()
        .map(|n| table.index_of(n))
        .collect::<Result<_>>()?;
    let target = table.index_of(ds.target_name())?;
    let views = model.views(ds)?;
    let weights = model.output_weights();
    let skel_cfg = SkeletonConfig {
        alpha: cfg.alpha,
        max_cond: cfg.max_cond,
    };
    let neurons = (0..model.nnlu_width())
        .into_par_iter()
        .map(|i| {
            let acts: Vec<f64> = train.iter().map(|&r| views[r].activations[i]).collect();
            let bins = NumericBins::fit(&acts, cfg.n_bins)?;
            let name = neuron_name(i, table.names());
            let mut t = table.clone();
            t.push(&name, bins.n_bins(), acts.iter().map(|&a| bins.bin(a)).collect())?;
            let skeleton = skeleton_search(&t, t.n_cols() - 1, &candidates, &[target], skel_cfg)?;
            let ccv = extract_ccv(&skeleton);
            log::debug!("{name}: CCV {ccv:?} after {} tests", skeleton.n_tests);
            Ok(NeuronReport {
                index: i,
                name,
                weight: weights[i],
                bins,
                ccv,
                skeleton,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if neurons.is_empty() {
        return Err(Error::InvalidData("model has no NNLU neurons".into()));
    }
    Ok(CausalReport {
        alpha: cfg.alpha,
        max_cond: cfg.max_cond,
        n_bins: cfg.n_bins,
        target: ds.target_name().to_string(),
        inputs,
        discretizer,
        neurons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlp::{Dense, FeatureEncoder, TrainConfig};
    use crate::store::{split, Column, SplitRatios};

    /// Three inputs; neuron 1 copies `a`, neuron 2 is constant.
    fn fixture() -> (MlpModel, TabularDataset) {
        let n = 3000;
        let mut rng = crate::rng_from_seed(5);
        use rand::Rng as _;
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<u32> = a.iter().map(|&v| u32::from(v > 0.0)).collect();
        let ds = TabularDataset::new(
            vec![
                Column::numeric("a", a),
                Column::numeric("b", b),
                Column::numeric("c", c),
                Column::binary("y", y),
            ],
            "y",
            "1",
        )
        .unwrap();
        let ds = split(&ds, SplitRatios::SYNTHETIC, 1).unwrap();
        let enc = FeatureEncoder::fit(&ds).unwrap();
        let mut h = Dense::zeros(3, 2);
        h.weights[0] = 1.0;
        h.bias = vec![2.0, 0.5];
        let mut out = Dense::zeros(2, 1);
        out.weights = vec![1.0, -1.0];
        let model = MlpModel::new(enc, vec![h, out], TrainConfig::default()).unwrap();
        (model, ds)
    }

    #[test]
    fn one_report_per_neuron() {
        let (model, ds) = fixture();
        let r = global_explain(&model, &ds, CausalConfig::default()).unwrap();
        assert_eq!(r.neurons.len(), 2);
        assert_eq!(r.neurons[0].ccv, vec!["a"]);
        assert!(r.neurons[1].ccv.is_empty());
        assert_eq!(r.ccv_union(), vec!["a"]);
        assert!(r.neurons.iter().all(|n| !n.ccv.contains(&"y".to_string())));
    }

    #[test]
    fn deterministic_json() {
        let (model, ds) = fixture();
        let a = serde_json::to_string(&global_explain(&model, &ds, CausalConfig::default()).unwrap()).unwrap();
        let b = serde_json::to_string(&global_explain(&model, &ds, CausalConfig::default()).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
