use serde::{Deserialize, Serialize};

use super::{EepCache, RowContext};
use crate::error::Result;

/// `ln(P(z | x_e) / P(z))` from the cache, for the row's configuration over
/// `vars`.
pub fn eep(cache: &EepCache, neuron: usize, z: u32, vars: &[usize], codes: &[u32]) -> Result<f64> {
    Ok((cache.conditional(neuron, vars, codes, z)? / cache.marginal(neuron, z)?).ln())
}

/// Expected EEP of a neuron over the training distribution of `vars`:
/// `Σ_x P(x) Σ_z P(z|x) ln(P(z|x)/P(z))`.
pub fn emi(cache: &EepCache, neuron: usize, vars: &[usize]) -> Result<f64> {
    let nc = &cache.neurons[neuron];
    let t = match cache.table(neuron, vars) {
        Some(t) => t,
        None => {
            return Err(crate::Error::InvalidArgument(format!(
                "no cached table for neuron {neuron} and inputs {vars:?}"
            )))
        }
    };
    let n = cache.n_rows as f64;
    let mut total = 0.0;
    let mut codes = vec![0u32; cache.cards.len()];
    for (k, &seen) in t.config_totals.iter().enumerate() {
        if seen == 0 {
            continue;
        }
        // Decode configuration k back into codes over `vars`.
        let mut rest = k;
        for &v in vars.iter().rev() {
            codes[v] = (rest % cache.cards[v]) as u32;
            rest /= cache.cards[v];
        }
        let px = f64::from(seen) / n;
        for z in 0..nc.n_states as u32 {
            let pzx = cache.conditional(neuron, vars, &codes, z)?;
            total += px * pzx * (pzx / cache.marginal(neuron, z)?).ln();
        }
    }
    Ok(total)
}

/// `H(z) − H(z | x)` for an exact joint given as `joint[x][z]`.
pub fn emi_from_joint(joint: &[Vec<f64>]) -> f64 {
    let h = |p: &[f64]| -> f64 { p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln()).sum() };
    let n_z = joint.first().map(Vec::len).unwrap_or(0);
    let pz: Vec<f64> = (0..n_z).map(|z| joint.iter().map(|r| r[z]).sum()).collect();
    let h_cond: f64 = joint
        .iter()
        .map(|r| {
            let px: f64 = r.iter().sum();
            if px > 0.0 {
                let cond: Vec<f64> = r.iter().map(|v| v / px).collect();
                px * h(&cond)
            } else {
                0.0
            }
        })
        .sum();
    h(&pz) - h_cond
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigItem {
    pub variable: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuronContribution {
    pub neuron: usize,
    /// `w_i · n̂_i`.
    pub weighted_activation: f64,
    pub eep: f64,
    /// What the neuron added to PEP or NEP (zero unless its EEP is positive).
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub config: Vec<ConfigItem>,
    pub pep: f64,
    pub nep: f64,
    pub tep: f64,
    pub contributions: Vec<NeuronContribution>,
}

impl Explanation {
    pub fn size(&self) -> usize {
        self.config.len()
    }

    pub fn variables(&self) -> Vec<&str> {
        self.config.iter().map(|c| c.variable.as_str()).collect()
    }
}

/// Scores of one configuration, without labels.
#[derive(Debug, Clone, PartialEq)]
pub struct TepParts {
    pub pep: f64,
    pub nep: f64,
    pub contributions: Vec<NeuronContribution>,
}

impl TepParts {
    pub fn tep(&self) -> f64 {
        self.pep + self.nep
    }
}

/// Combines per-neuron `(w_i, n̂_i, EEP_i)` into PEP and NEP: positive EEPs
/// only, split by the sign of `w_i` (zero counts as positive), and the bias
/// added to both sums.
pub fn combine(terms: &[(usize, f64, f64, f64)], bias: f64) -> TepParts {
    let mut pep = bias;
    let mut nep = bias;
    let contributions = terms
        .iter()
        .map(|&(neuron, w, act, e)| {
            let contribution = if e > 0.0 { w * act * e } else { 0.0 };
            if w >= 0.0 {
                pep += contribution;
            } else {
                nep += contribution;
            }
            NeuronContribution {
                neuron,
                weighted_activation: w * act,
                eep: e,
                contribution,
            }
        })
        .collect();
    TepParts {
        pep,
        nep,
        contributions,
    }
}

/// PEP/NEP/TEP of the row's configuration over `vars` (feature indices,
/// ascending). Only neurons whose CCV contains every variable in `vars`
/// take part.
pub fn tep_score(cache: &EepCache, ctx: &RowContext, vars: &[usize]) -> Result<TepParts> {
    let mut terms = Vec::new();
    for (i, (&w, &act)) in ctx.view.weights.iter().zip(&ctx.view.activations).enumerate() {
        if !cache.covers(i, vars) {
            continue;
        }
        let e = eep(cache, i, ctx.neuron_states[i], vars, &ctx.codes)?;
        terms.push((i, w, act, e));
    }
    Ok(combine(&terms, ctx.view.bias))
}
