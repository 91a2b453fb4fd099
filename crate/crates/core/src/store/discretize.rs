//! Equal-frequency discretization with a dedicated bin for heavy values.
//!
//! Any single value holding at least `1/n_bins` of the fitted mass (the zero
//! of a ReLU unit, typically) gets its own bin; the remaining values are
//! split into equal-frequency bins. Edges sit at midpoints between adjacent
//! distinct values, so applying a fitted discretizer never depends on data.

use serde::{Deserialize, Serialize};

use super::{Column, ColumnData, DiscreteTable, SplitTag, TabularDataset};
use crate::error::{invalid_arg, Error, Result};

pub const DEFAULT_BINS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericBins {
    /// Strictly increasing interior cut points; `edges.len() + 1` bins.
    pub edges: Vec<f64>,
    /// Set when the fitted values were constant.
    #[serde(default)]
    pub degenerate: bool,
}

enum Block {
    Heavy(usize),
    Segment(usize, usize),
}

impl NumericBins {
    pub fn fit(values: &[f64], n_bins: usize) -> Result<Self> {
        if n_bins == 0 {
            return invalid_arg("n_bins must be at least 1");
        }
        if values.is_empty() {
            return Err(Error::InvalidData("cannot fit bins on zero values".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("cannot fit bins on non-finite values".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut distinct: Vec<(f64, usize)> = Vec::new();
        for v in sorted {
            match distinct.last_mut() {
                Some((last, count)) if *last == v => *count += 1,
                _ => distinct.push((v, 1)),
            }
        }
        if distinct.len() == 1 {
            log::warn!("constant column; using a single bin");
            return Ok(NumericBins {
                edges: Vec::new(),
                degenerate: true,
            });
        }

        let n = values.len();
        let is_heavy = |count: usize| count * n_bins >= n;
        let mut blocks = Vec::new();
        let mut seg_start = None;
        for (i, &(_, count)) in distinct.iter().enumerate() {
            if is_heavy(count) {
                if let Some(s) = seg_start.take() {
                    blocks.push(Block::Segment(s, i));
                }
                blocks.push(Block::Heavy(i));
            } else if seg_start.is_none() {
                seg_start = Some(i);
            }
        }
        if let Some(s) = seg_start {
            blocks.push(Block::Segment(s, distinct.len()));
        }

        let n_heavy = blocks.iter().filter(|b| matches!(b, Block::Heavy(_))).count();
        let remaining_bins = n_bins.saturating_sub(n_heavy);
        let seg_mass: Vec<usize> = blocks
            .iter()
            .filter_map(|b| match *b {
                Block::Segment(s, e) => Some(distinct[s..e].iter().map(|d| d.1).sum()),
                Block::Heavy(_) => None,
            })
            .collect();
        let seg_len: Vec<usize> = blocks
            .iter()
            .filter_map(|b| match *b {
                Block::Segment(s, e) => Some(e - s),
                Block::Heavy(_) => None,
            })
            .collect();
        let alloc = allocate(remaining_bins, &seg_mass, &seg_len);

        // Groups of distinct-value indices; edges go between consecutive groups.
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut pending: Vec<usize> = Vec::new();
        let mut seg_idx = 0;
        for block in &blocks {
            match *block {
                Block::Heavy(i) => {
                    let mut g = std::mem::take(&mut pending);
                    g.push(i);
                    groups.push(g);
                }
                Block::Segment(s, e) => {
                    let k = alloc[seg_idx];
                    seg_idx += 1;
                    if k == 0 {
                        match groups.last_mut() {
                            Some(g) => g.extend(s..e),
                            None => pending.extend(s..e),
                        }
                        continue;
                    }
                    let counts: Vec<usize> = distinct[s..e].iter().map(|d| d.1).collect();
                    let cuts = equal_frequency_cuts(&counts, k);
                    let mut lo = 0;
                    for c in cuts.into_iter().chain(std::iter::once(e - s)) {
                        let mut g = std::mem::take(&mut pending);
                        g.extend(s + lo..s + c);
                        groups.push(g);
                        lo = c;
                    }
                }
            }
        }
        if !pending.is_empty() {
            groups.push(pending);
        }

        let edges = groups
            .windows(2)
            .map(|w| {
                let a = distinct[*w[0].last().expect("non-empty group")].0;
                let b = distinct[w[1][0]].0;
                let mid = a + (b - a) / 2.0;
                if mid < b {
                    mid
                } else {
                    a
                }
            })
            .collect();
        Ok(NumericBins {
            edges,
            degenerate: false,
        })
    }

    pub fn n_bins(&self) -> usize {
        self.edges.len() + 1
    }

    /// Total: values below the first edge go to bin 0, above the last edge
    /// to the top bin.
    pub fn bin(&self, value: f64) -> u32 {
        self.edges.partition_point(|&e| e < value) as u32
    }
}

/// Largest-remainder allocation of `bins` over segments by mass, capped at
/// each segment's number of distinct values.
fn allocate(bins: usize, mass: &[usize], len: &[usize]) -> Vec<usize> {
    let total: usize = mass.iter().sum();
    if bins == 0 || total == 0 {
        return vec![0; mass.len()];
    }
    let quotas: Vec<f64> = mass
        .iter()
        .map(|&m| bins as f64 * m as f64 / total as f64)
        .collect();
    let mut alloc: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut left = bins - alloc.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..mass.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(order.len() * 2) {
        if left == 0 {
            break;
        }
        alloc[i] += 1;
        left -= 1;
    }
    for (a, &l) in alloc.iter_mut().zip(len) {
        *a = (*a).min(l);
    }
    alloc
}

/// Cut positions (count of distinct values in the lower part) splitting a
/// run with per-value `counts` into `k` bins of near-equal mass.
fn equal_frequency_cuts(counts: &[usize], k: usize) -> Vec<usize> {
    let total: usize = counts.iter().sum();
    let mut cum = Vec::with_capacity(counts.len() + 1);
    cum.push(0usize);
    for c in counts {
        cum.push(cum.last().unwrap() + c);
    }
    let len = counts.len();
    let mut cuts = Vec::with_capacity(k.saturating_sub(1));
    let mut prev = 0;
    for j in 1..k {
        let target = j as f64 * total as f64 / k as f64;
        let lo = prev + 1;
        let hi = len - (k - j);
        if lo > hi {
            break;
        }
        let best = (lo..=hi)
            .min_by(|&a, &b| {
                let da = (cum[a] as f64 - target).abs();
                let db = (cum[b] as f64 - target).abs();
                da.total_cmp(&db)
            })
            .expect("non-empty range");
        cuts.push(best);
        prev = best;
    }
    cuts
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ColumnBins {
    Numeric(NumericBins),
    Categorical { levels: Vec<String> },
}

impl ColumnBins {
    pub fn n_bins(&self) -> usize {
        match self {
            ColumnBins::Numeric(b) => b.n_bins(),
            ColumnBins::Categorical { levels } => levels.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnDiscretizer {
    pub name: String,
    pub bins: ColumnBins,
}

/// Per-column bin edges (numeric) or state dictionaries (categorical),
/// fitted on the training rows of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discretizer {
    pub n_bins: usize,
    pub columns: Vec<ColumnDiscretizer>,
}

impl Discretizer {
    pub fn fit(ds: &TabularDataset, n_bins: usize) -> Result<Self> {
        let train = ds.rows(SplitTag::Train);
        if train.is_empty() {
            return Err(Error::InvalidData("no training rows to fit the discretizer".into()));
        }
        let mut columns = Vec::with_capacity(ds.columns().len());
        for col in ds.columns() {
            let bins = match &col.data {
                ColumnData::Numeric(v) => {
                    let values: Vec<f64> = train.iter().map(|&r| v[r]).collect();
                    let b = NumericBins::fit(&values, n_bins)?;
                    if b.degenerate {
                        log::warn!("column `{}` is constant on the training rows", col.name);
                    }
                    ColumnBins::Numeric(b)
                }
                ColumnData::Categorical { levels, .. } => ColumnBins::Categorical {
                    levels: levels.clone(),
                },
            };
            columns.push(ColumnDiscretizer {
                name: col.name.clone(),
                bins,
            });
        }
        Ok(Discretizer { n_bins, columns })
    }

    pub fn get(&self, name: &str) -> Result<&ColumnBins> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| &c.bins)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Bin index for every value of `column`.
    pub fn apply(&self, column: &Column) -> Result<Vec<u32>> {
        match (self.get(&column.name)?, &column.data) {
            (ColumnBins::Numeric(b), ColumnData::Numeric(v)) => {
                Ok(v.iter().map(|&x| b.bin(x)).collect())
            }
            (ColumnBins::Categorical { levels }, ColumnData::Categorical { levels: own, codes }) => {
                if own == levels {
                    return Ok(codes.clone());
                }
                // Remap by label; unseen labels fall into the last state.
                let map: Vec<u32> = own
                    .iter()
                    .map(|l| {
                        levels
                            .iter()
                            .position(|x| x == l)
                            .unwrap_or(levels.len().saturating_sub(1)) as u32
                    })
                    .collect();
                Ok(codes.iter().map(|&c| map[c as usize]).collect())
            }
            _ => Err(Error::InvalidData(format!(
                "column `{}` kind does not match its discretizer",
                column.name
            ))),
        }
    }

    /// Discretizes every column of `ds` (all rows).
    pub fn discretize(&self, ds: &TabularDataset) -> Result<DiscreteTable> {
        let mut table = DiscreteTable::default();
        for col in ds.columns() {
            let codes = self.apply(col)?;
            table.push(&col.name, self.get(&col.name)?.n_bins(), codes)?;
        }
        Ok(table)
    }
}
