use serde::{Deserialize, Serialize};

use super::{FeatureEncoder, TrainConfig};
use crate::error::{Error, Result};
use crate::store::TabularDataset;

/// Fully connected layer; `weights` is row-major `n_out × n_in`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub n_in: usize,
    pub n_out: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(n_in: usize, n_out: usize) -> Self {
        Dense {
            n_in,
            n_out,
            weights: vec![0.0; n_in * n_out],
            bias: vec![0.0; n_out],
        }
    }

    pub(crate) fn affine(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for o in 0..self.n_out {
            let row = &self.weights[o * self.n_in..(o + 1) * self.n_in];
            let z: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum();
            out.push(z + self.bias[o]);
        }
    }
}

/// Which checkpoint training kept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub best_epoch: usize,
    pub val_pr_auc: f64,
}

/// Feed-forward binary classifier: ReLU hidden layers and a single logit
/// output. The last hidden layer is the nearest-neighbour latent unit
/// (NNLU) whose neurons are analyzed causally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    /// Layer widths from input to output, e.g. `[d_in, 16, 5, 1]`.
    pub architecture: Vec<usize>,
    pub layers: Vec<Dense>,
    pub encoder: FeatureEncoder,
    pub config: TrainConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection: Option<Selection>,
}

/// The NNLU seen from one input row.
#[derive(Debug, Clone, PartialEq)]
pub struct NnluView {
    /// Post-ReLU neuron outputs, all `>= 0`.
    pub activations: Vec<f64>,
    /// Output-layer weights, one per neuron.
    pub weights: Vec<f64>,
    pub bias: f64,
    /// `sum_i weights[i] * activations[i] + bias`.
    pub logit: f64,
}

impl MlpModel {
    pub fn new(encoder: FeatureEncoder, layers: Vec<Dense>, config: TrainConfig) -> Result<Self> {
        if layers.len() < 2 || layers.last().map(|l| l.n_out) != Some(1) {
            return Err(Error::InvalidData(
                "model needs at least one hidden layer and a single output".into(),
            ));
        }
        for w in layers.windows(2) {
            if w[0].n_out != w[1].n_in {
                return Err(Error::DimensionMismatch {
                    expected: w[0].n_out,
                    got: w[1].n_in,
                });
            }
        }
        if layers[0].n_in != encoder.width() {
            return Err(Error::DimensionMismatch {
                expected: encoder.width(),
                got: layers[0].n_in,
            });
        }
        let mut architecture = vec![layers[0].n_in];
        architecture.extend(layers.iter().map(|l| l.n_out));
        Ok(MlpModel {
            architecture,
            layers,
            encoder,
            config,
            selection: None,
        })
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].n_in
    }

    /// Number of NNLU neurons.
    pub fn nnlu_width(&self) -> usize {
        self.output_layer().n_in
    }

    fn output_layer(&self) -> &Dense {
        self.layers.last().expect("validated non-empty")
    }

    pub fn output_weights(&self) -> &[f64] {
        &self.output_layer().weights
    }

    pub fn output_bias(&self) -> f64 {
        self.output_layer().bias[0]
    }

    /// NNLU activations for one encoded input vector.
    pub fn nnlu_activations(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_width() {
            return Err(Error::DimensionMismatch {
                expected: self.input_width(),
                got: x.len(),
            });
        }
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        for layer in &self.layers[..self.layers.len() - 1] {
            layer.affine(&cur, &mut next);
            next.iter_mut().for_each(|v| *v = v.max(0.0));
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }

    pub fn nnlu_view(&self, x: &[f64]) -> Result<NnluView> {
        let activations = self.nnlu_activations(x)?;
        let weights = self.output_weights().to_vec();
        let bias = self.output_bias();
        let logit = weights
            .iter()
            .zip(&activations)
            .map(|(w, n)| w * n)
            .sum::<f64>()
            + bias;
        Ok(NnluView {
            activations,
            weights,
            bias,
            logit,
        })
    }

    pub fn logit(&self, x: &[f64]) -> Result<f64> {
        Ok(self.nnlu_view(x)?.logit)
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        Ok(sigmoid(self.logit(x)?))
    }

    /// Logits for every row of an encoded row-major matrix.
    pub fn logits(&self, xs: &[f64]) -> Result<Vec<f64>> {
        let w = self.input_width();
        xs.chunks(w).map(|x| self.logit(x)).collect()
    }

    /// Encodes `ds` with the model's encoder and returns NNLU views of all rows.
    pub fn views(&self, ds: &TabularDataset) -> Result<Vec<NnluView>> {
        let xs = self.encoder.encode(ds)?;
        xs.chunks(self.input_width()).map(|x| self.nnlu_view(x)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: MlpModel = serde_json::from_str(text)?;
        let mut m = MlpModel::new(raw.encoder, raw.layers, raw.config)?;
        if m.architecture != raw.architecture {
            return Err(Error::InvalidData(format!(
                "architecture {:?} does not match layers {:?}",
                raw.architecture, m.architecture
            )));
        }
        m.selection = raw.selection;
        Ok(m)
    }
}

/// Partition of NNLU neuron indices by the sign of their output weight;
/// zero weights count as positive.
pub fn split_signs(weights: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let (pos, neg): (Vec<usize>, Vec<usize>) = (0..weights.len()).partition(|&i| weights[i] >= 0.0);
    (pos, neg)
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}
