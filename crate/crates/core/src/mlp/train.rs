use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{pr_auc, Dense, FeatureEncoder, MlpModel, Selection};
use crate::error::{invalid_arg, Error, Result};
use crate::store::{SplitTag, TabularDataset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    #[serde(alias = "batch")]
    pub batch_size: usize,
    #[serde(alias = "lr")]
    pub learning_rate: f64,
    pub seed: u64,
    /// Hidden layer widths; the last one is the NNLU.
    pub hidden: Vec<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 100,
            batch_size: 64,
            learning_rate: 1e-3,
            seed: 42,
            hidden: vec![16, 5],
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return invalid_arg("epochs must be at least 1");
        }
        if self.batch_size == 0 {
            return invalid_arg("batch size must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return invalid_arg("learning rate must be positive");
        }
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return invalid_arg("hidden layers must be non-empty with positive widths");
        }
        Ok(())
    }
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPS: f64 = 1e-8;

/// Numerically stable binary cross-entropy on a logit.
fn bce_with_logit(z: f64, y: f64) -> f64 {
    z.max(0.0) - z * y + (-z.abs()).exp().ln_1p()
}

/// Mean loss and its gradient over the rows `idx` of the encoded matrix.
pub fn loss_and_gradients(
    layers: &[Dense],
    xs: &[f64],
    ys: &[u8],
    idx: &[usize],
) -> (f64, Vec<Dense>) {
    let width = layers[0].n_in;
    let mut grads: Vec<Dense> = layers.iter().map(|l| Dense::zeros(l.n_in, l.n_out)).collect();
    let mut acts: Vec<Vec<f64>> = vec![Vec::new(); layers.len() + 1];
    let mut loss = 0.0;
    let last = layers.len() - 1;
    for &r in idx {
        acts[0].clear();
        acts[0].extend_from_slice(&xs[r * width..(r + 1) * width]);
        for (k, layer) in layers.iter().enumerate() {
            let (head, tail) = acts.split_at_mut(k + 1);
            layer.affine(&head[k], &mut tail[0]);
            if k < last {
                tail[0].iter_mut().for_each(|v| *v = v.max(0.0));
            }
        }
        let z = acts[layers.len()][0];
        let y = f64::from(ys[r]);
        loss += bce_with_logit(z, y);
        let mut delta = vec![super::sigmoid(z) - y];
        for k in (0..layers.len()).rev() {
            let layer = &layers[k];
            let input = &acts[k];
            let g = &mut grads[k];
            for o in 0..layer.n_out {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                g.bias[o] += d;
                let row = &mut g.weights[o * layer.n_in..(o + 1) * layer.n_in];
                row.iter_mut().zip(input).for_each(|(w, a)| *w += d * a);
            }
            if k > 0 {
                let mut prev = vec![0.0; layer.n_in];
                for (o, &d) in delta.iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    let row = &layer.weights[o * layer.n_in..(o + 1) * layer.n_in];
                    prev.iter_mut().zip(row).for_each(|(p, w)| *p += d * w);
                }
                // ReLU derivative: zero where the unit was inactive.
                prev.iter_mut()
                    .zip(input)
                    .for_each(|(p, &a)| if a <= 0.0 { *p = 0.0 });
                delta = prev;
            }
        }
    }
    let scale = 1.0 / idx.len().max(1) as f64;
    for g in &mut grads {
        g.weights.iter_mut().for_each(|v| *v *= scale);
        g.bias.iter_mut().for_each(|v| *v *= scale);
    }
    (loss * scale, grads)
}

struct Adam {
    m: Vec<Dense>,
    v: Vec<Dense>,
    t: i32,
    lr: f64,
}

impl Adam {
    fn new(layers: &[Dense], lr: f64) -> Self {
        let zeros = || layers.iter().map(|l| Dense::zeros(l.n_in, l.n_out)).collect();
        Adam {
            m: zeros(),
            v: zeros(),
            t: 0,
            lr,
        }
    }

    fn step(&mut self, layers: &mut [Dense], grads: &[Dense]) {
        self.t += 1;
        let c1 = 1.0 - BETA1.powi(self.t);
        let c2 = 1.0 - BETA2.powi(self.t);
        let lr = self.lr;
        let update = |p: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64]| {
            for i in 0..p.len() {
                m[i] = BETA1 * m[i] + (1.0 - BETA1) * g[i];
                v[i] = BETA2 * v[i] + (1.0 - BETA2) * g[i] * g[i];
                p[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + EPS);
            }
        };
        for k in 0..layers.len() {
            update(
                &mut layers[k].weights,
                &grads[k].weights,
                &mut self.m[k].weights,
                &mut self.v[k].weights,
            );
            update(
                &mut layers[k].bias,
                &grads[k].bias,
                &mut self.m[k].bias,
                &mut self.v[k].bias,
            );
        }
    }
}

fn init_layers(sizes: &[usize], rng: &mut crate::Rng) -> Vec<Dense> {
    sizes
        .windows(2)
        .map(|w| {
            let mut d = Dense::zeros(w[0], w[1]);
            let limit = (6.0 / w[0].max(1) as f64).sqrt();
            d.weights
                .iter_mut()
                .for_each(|v| *v = rng.random_range(-limit..limit));
            d
        })
        .collect()
}

fn both_classes(labels: &[u8], rows: &[usize]) -> bool {
    let pos = rows.iter().filter(|&&r| labels[r] == 1).count();
    pos > 0 && pos < rows.len()
}

/// Trains on the train split and keeps the epoch with the best validation
/// PR-AUC (earliest epoch on ties).
pub fn train(ds: &TabularDataset, cfg: &TrainConfig) -> Result<MlpModel> {
    cfg.validate()?;
    let train_rows = ds.rows(SplitTag::Train);
    let val_rows = ds.rows(SplitTag::Val);
    let labels = ds.labels();
    if !both_classes(&labels, &train_rows) {
        return Err(Error::DegenerateTarget(format!(
            "training labels of `{}` contain a single class",
            ds.target_name()
        )));
    }
    if !both_classes(&labels, &val_rows) {
        return Err(Error::DegenerateTarget(format!(
            "validation labels of `{}` contain a single class",
            ds.target_name()
        )));
    }
    let encoder = FeatureEncoder::fit(ds)?;
    let xs = encoder.encode(ds)?;
    let mut sizes = vec![encoder.width()];
    sizes.extend(&cfg.hidden);
    sizes.push(1);

    let mut rng = crate::rng_from_seed(cfg.seed);
    let mut layers = init_layers(&sizes, &mut rng);
    let mut adam = Adam::new(&layers, cfg.learning_rate);
    let mut model = MlpModel::new(encoder, layers.clone(), cfg.clone())?;
    let val_labels: Vec<u8> = val_rows.iter().map(|&r| labels[r]).collect();
    let mut best: Option<(Selection, Vec<Dense>)> = None;
    let mut order = train_rows.clone();

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let (loss, grads) = loss_and_gradients(&layers, &xs, &labels, batch);
            if !loss.is_finite() {
                return Err(Error::TrainingDiverged { epoch });
            }
            epoch_loss += loss * batch.len() as f64;
            adam.step(&mut layers, &grads);
        }
        model.layers.clone_from(&layers);
        let width = model.input_width();
        let scores = val_rows
            .iter()
            .map(|&r| model.logit(&xs[r * width..(r + 1) * width]))
            .collect::<Result<Vec<f64>>>()?;
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::TrainingDiverged { epoch });
        }
        let auc = pr_auc(&scores, &val_labels)?;
        log::debug!(
            "epoch {epoch}: train loss {:.5}, val PR-AUC {auc:.5}",
            epoch_loss / order.len() as f64
        );
        if best.as_ref().is_none_or(|(s, _)| auc > s.val_pr_auc) {
            best = Some((
                Selection {
                    best_epoch: epoch,
                    val_pr_auc: auc,
                },
                layers.clone(),
            ));
        }
    }
    let (selection, best_layers) = best.expect("at least one epoch");
    model.layers = best_layers;
    model.selection = Some(selection);
    log::info!(
        "selected epoch {} with validation PR-AUC {:.4}",
        selection.best_epoch,
        selection.val_pr_auc
    );
    Ok(model)
}
