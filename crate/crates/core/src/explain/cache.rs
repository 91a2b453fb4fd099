use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ExplainConfig;
use crate::causal::CausalReport;
use crate::error::{Error, Result};
use crate::mlp::{MlpModel, NnluView};
use crate::store::{SplitTag, TabularDataset};

/// Counts of a neuron's discretized value against one configuration space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetTable {
    /// Feature indices, ascending.
    pub vars: Vec<usize>,
    /// `n_configs × n_states`, row-major; configurations in mixed radix
    /// over `vars` (last fastest).
    pub counts: Vec<u32>,
    pub config_totals: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuronCache {
    pub n_states: usize,
    pub marginal: Vec<u32>,
    pub ccv: Vec<usize>,
    pub tables: BTreeMap<Vec<usize>, SubsetTable>,
}

/// Training-data probability tables for every neuron and every subset of its
/// CCV up to the configured size. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EepCache {
    pub smoothing: f64,
    pub max_size: usize,
    pub n_rows: usize,
    /// Number of bins/states of each input, in input order.
    pub cards: Vec<usize>,
    pub neurons: Vec<NeuronCache>,
}

/// Discretized inputs and NNLU state of one row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowContext {
    pub row: usize,
    /// Bin or state index per input, in input order.
    pub codes: Vec<u32>,
    pub view: NnluView,
    /// Discretized value of each neuron on this row.
    pub neuron_states: Vec<u32>,
}

pub(crate) fn config_index(vars: &[usize], codes: &[u32], cards: &[usize]) -> usize {
    vars.iter()
        .fold(0, |acc, &v| acc * cards[v] + codes[v] as usize)
}

/// Every non-empty subset of `items` with at most `max` elements, by size
/// then lexicographically.
pub fn subsets_up_to(items: &[usize], max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max.min(items.len()) {
        let mut next = Vec::new();
        for s in &level {
            let start = s
                .last()
                .map(|l| items.iter().position(|x| x == l).expect("member") + 1)
                .unwrap_or(0);
            for &it in &items[start..] {
                let mut t = s.clone();
                t.push(it);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

impl EepCache {
    /// Discretizes `rows` of `ds` with the report's bins.
    pub fn contexts(
        model: &MlpModel,
        report: &CausalReport,
        ds: &TabularDataset,
        rows: &[usize],
    ) -> Result<Vec<RowContext>> {
        let codes: Vec<Vec<u32>> = report
            .inputs
            .iter()
            .map(|name| report.discretizer.apply(ds.column(name)?))
            .collect::<Result<_>>()?;
        let xs = model.encoder.encode(ds)?;
        let w = model.input_width();
        rows.iter()
            .map(|&r| {
                if r >= ds.n_rows() {
                    return Err(Error::InvalidArgument(format!("row {r} out of range")));
                }
                let view = model.nnlu_view(&xs[r * w..(r + 1) * w])?;
                if view.activations.len() != report.neurons.len() {
                    return Err(Error::DimensionMismatch {
                        expected: report.neurons.len(),
                        got: view.activations.len(),
                    });
                }
                let neuron_states = report
                    .neurons
                    .iter()
                    .zip(&view.activations)
                    .map(|(n, &a)| n.bins.bin(a))
                    .collect();
                Ok(RowContext {
                    row: r,
                    codes: codes.iter().map(|c| c[r]).collect(),
                    view,
                    neuron_states,
                })
            })
            .collect()
    }

    pub fn build(
        model: &MlpModel,
        report: &CausalReport,
        ds: &TabularDataset,
        cfg: &ExplainConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let cards: Vec<usize> = report
            .inputs
            .iter()
            .map(|n| Ok(report.discretizer.get(n)?.n_bins()))
            .collect::<Result<_>>()?;
        let train = ds.rows(SplitTag::Train);
        let ctx = Self::contexts(model, report, ds, &train)?;
        let neurons = report
            .neurons
            .iter()
            .enumerate()
            .map(|(i, nr)| {
                let ccv: Vec<usize> = nr
                    .ccv
                    .iter()
                    .map(|v| {
                        report
                            .inputs
                            .iter()
                            .position(|x| x == v)
                            .ok_or_else(|| Error::UnknownVariable(v.clone()))
                    })
                    .collect::<Result<_>>()?;
                let n_states = nr.bins.n_bins();
                let mut marginal = vec![0u32; n_states];
                for c in &ctx {
                    marginal[c.neuron_states[i] as usize] += 1;
                }
                let tables = subsets_up_to(&ccv, cfg.m)
                    .into_iter()
                    .map(|vars| {
                        let n_cfg: usize = vars.iter().map(|&v| cards[v]).product();
                        let mut counts = vec![0u32; n_cfg * n_states];
                        let mut config_totals = vec![0u32; n_cfg];
                        for c in &ctx {
                            let k = config_index(&vars, &c.codes, &cards);
                            counts[k * n_states + c.neuron_states[i] as usize] += 1;
                            config_totals[k] += 1;
                        }
                        (
                            vars.clone(),
                            SubsetTable {
                                vars,
                                counts,
                                config_totals,
                            },
                        )
                    })
                    .collect();
                Ok(NeuronCache {
                    n_states,
                    marginal,
                    ccv,
                    tables,
                })
            })
            .collect::<Result<_>>()?;
        Ok(EepCache {
            smoothing: cfg.smoothing,
            max_size: cfg.m,
            n_rows: train.len(),
            cards,
            neurons,
        })
    }

    fn smoothed(&self, count: u32, total: u32, states: usize) -> Result<f64> {
        let den = f64::from(total) + self.smoothing * states as f64;
        if den <= 0.0 {
            return Err(Error::UndefinedProbability(
                "configuration never seen in training data and smoothing is off".into(),
            ));
        }
        Ok((f64::from(count) + self.smoothing) / den)
    }

    /// Smoothed `P(neuron = z)`.
    pub fn marginal(&self, neuron: usize, z: u32) -> Result<f64> {
        let nc = &self.neurons[neuron];
        self.smoothed(nc.marginal[z as usize], self.n_rows as u32, nc.n_states)
    }

    pub fn table(&self, neuron: usize, vars: &[usize]) -> Option<&SubsetTable> {
        self.neurons[neuron].tables.get(vars)
    }

    /// Smoothed `P(neuron = z | vars = codes[vars])`.
    pub fn conditional(&self, neuron: usize, vars: &[usize], codes: &[u32], z: u32) -> Result<f64> {
        let nc = &self.neurons[neuron];
        let t = self.table(neuron, vars).ok_or_else(|| {
            Error::InvalidArgument(format!("no cached table for neuron {neuron} and inputs {vars:?}"))
        })?;
        let k = config_index(vars, codes, &self.cards);
        self.smoothed(
            t.counts[k * nc.n_states + z as usize],
            t.config_totals[k],
            nc.n_states,
        )
    }

    /// Whether neuron `i` is explained by configurations over `vars`.
    pub fn covers(&self, neuron: usize, vars: &[usize]) -> bool {
        vars.iter().all(|v| self.neurons[neuron].ccv.contains(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_enumeration() {
        assert_eq!(
            subsets_up_to(&[2, 5, 7], 2),
            vec![vec![2], vec![5], vec![7], vec![2, 5], vec![2, 7], vec![5, 7]]
        );
        assert_eq!(subsets_up_to(&[1, 2], 5).len(), 3);
        assert_eq!(subsets_up_to(&(0..10).collect::<Vec<_>>(), 2).len(), 55);
        assert!(subsets_up_to(&[], 3).is_empty());
    }

    #[test]
    fn config_index_is_mixed_radix() {
        let cards = [3, 2, 4];
        assert_eq!(config_index(&[0, 2], &[2, 1, 3], &cards), 2 * 4 + 3);
        assert_eq!(config_index(&[1], &[2, 1, 3], &cards), 1);
    }
}
