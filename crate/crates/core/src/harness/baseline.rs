use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Error, Result};
use crate::mlp::{FeatureEncoder, FeatureEncoding};

/// Local linear surrogate settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineConfig {
    pub n_perturbations: usize,
    /// Kernel width; `None` means `0.75 · sqrt(#variables)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_width: Option<f64>,
    pub ridge: f64,
    pub seed: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            n_perturbations: 1000,
            kernel_width: None,
            ridge: 1.0,
            seed: 42,
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_perturbations < 10 {
            return invalid_arg("n_perturbations must be at least 10");
        }
        if !(self.ridge >= 0.0) || self.kernel_width.is_some_and(|w| !(w > 0.0)) {
            return invalid_arg("ridge must be non-negative and kernel width positive");
        }
        Ok(())
    }
}

/// Per-variable importance `|coefficient|` of a kernel-weighted ridge fit
/// of `f` around the encoded row `x`.
///
/// Numeric inputs are perturbed with unit Gaussian noise (inputs are
/// standardized) and enter the fit as values. A categorical input keeps its
/// level with probability one half and otherwise takes a uniform level; it
/// enters the fit as the indicator "same level as the row".
pub fn baseline_local_linear(
    f: impl Fn(&[f64]) -> f64,
    encoder: &FeatureEncoder,
    x: &[f64],
    cfg: &BaselineConfig,
    stream: u64,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    if x.len() != encoder.width() {
        return Err(Error::DimensionMismatch {
            expected: encoder.width(),
            got: x.len(),
        });
    }
    let groups = encoder.groups();
    let d = groups.len();
    let n = cfg.n_perturbations;
    let mut rng = crate::rng_from_seed(cfg.seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut design = DMatrix::<f64>::zeros(n, d);
    let mut y = DVector::<f64>::zeros(n);
    let mut w = DVector::<f64>::zeros(n);
    let width = cfg.kernel_width.unwrap_or(0.75 * (d as f64).sqrt());
    let mut z = x.to_vec();
    for s in 0..n {
        z.copy_from_slice(x);
        let mut dist2 = 0.0;
        for (j, (feat, (_, range))) in encoder.features.iter().zip(&groups).enumerate() {
            match &feat.encoding {
                FeatureEncoding::Numeric { .. } => {
                    let noise: f64 = if s == 0 { 0.0 } else { StandardNormal.sample(&mut rng) };
                    let v = x[range.start] + noise;
                    z[range.start] = v;
                    design[(s, j)] = v;
                    dist2 += (v - x[range.start]).powi(2);
                }
                FeatureEncoding::Categorical { levels } => {
                    let k = levels.len();
                    let keep = s == 0 || k == 0 || rng.random::<bool>();
                    if !keep {
                        let level = rng.random_range(0..k);
                        z[range.clone()].iter_mut().for_each(|v| *v = 0.0);
                        z[range.start + level] = 1.0;
                    }
                    let same = z[range.clone()] == x[range.clone()];
                    design[(s, j)] = if same { 1.0 } else { 0.0 };
                    if !same {
                        dist2 += 1.0;
                    }
                }
            }
        }
        y[s] = f(&z);
        w[s] = (-dist2 / (width * width)).exp();
    }
    let coef = weighted_ridge(&design, &y, &w, cfg.ridge)?;
    Ok(coef.iter().map(|c| c.abs()).collect())
}

/// Weighted ridge regression with an unpenalized intercept; the ridge is
/// raised tenfold until the system solves.
fn weighted_ridge(x: &DMatrix<f64>, y: &DVector<f64>, w: &DVector<f64>, ridge: f64) -> Result<Vec<f64>> {
    let sw: f64 = w.sum();
    if sw <= 0.0 {
        return Err(Error::InvalidData("all kernel weights vanished".into()));
    }
    let d = x.ncols();
    let xm: Vec<f64> = (0..d).map(|j| x.column(j).dot(w) / sw).collect();
    let ym = y.dot(w) / sw;
    let mut xc = x.clone();
    for j in 0..d {
        for i in 0..x.nrows() {
            xc[(i, j)] = (x[(i, j)] - xm[j]) * w[i].sqrt();
        }
    }
    let yc = DVector::from_iterator(y.len(), (0..y.len()).map(|i| (y[i] - ym) * w[i].sqrt()));
    let gram = xc.transpose() * &xc;
    let rhs = xc.transpose() * yc;
    let mut lambda = ridge;
    for _ in 0..12 {
        let a = &gram + DMatrix::<f64>::identity(d, d) * lambda;
        if let Some(ch) = a.cholesky() {
            return Ok(ch.solve(&rhs).iter().copied().collect());
        }
        lambda = if lambda > 0.0 { lambda * 10.0 } else { 1e-8 };
    }
    Err(Error::InvalidData("ridge system stayed singular".into()))
}
