use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{SplitTag, TabularDataset};
use crate::error::{invalid_arg, Result};

/// Train/validation/test proportions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios(pub [f64; 3]);

impl SplitRatios {
    pub const SYNTHETIC: SplitRatios = SplitRatios([0.8, 0.1, 0.1]);
    pub const QUASI_REAL: SplitRatios = SplitRatios([0.9, 0.05, 0.05]);

    pub fn validate(&self) -> Result<()> {
        let sum: f64 = self.0.iter().sum();
        if self.0.iter().any(|r| !(0.0..=1.0).contains(r)) || (sum - 1.0).abs() > 1e-9 {
            return invalid_arg(format!("split ratios {:?} must be in [0,1] and sum to 1", self.0));
        }
        Ok(())
    }

    /// Row counts per split for `n` rows: train and val are rounded, test
    /// takes the remainder.
    pub fn counts(&self, n: usize) -> (usize, usize, usize) {
        let train = ((self.0[0] * n as f64).round() as usize).min(n);
        let val = ((self.0[1] * n as f64).round() as usize).min(n - train);
        (train, val, n - train - val)
    }

    /// Parses `"80:10:10"` or `"0.8:0.1:0.1"`; integer-looking triples are
    /// read as percentages.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .or_else(|_| invalid_arg(format!("cannot parse split `{s}`")))?;
        if parts.len() != 3 {
            return invalid_arg(format!("split `{s}` needs three parts"));
        }
        let sum: f64 = parts.iter().sum();
        let scale = if (sum - 100.0).abs() < 1e-9 { 100.0 } else { 1.0 };
        let r = SplitRatios([parts[0] / scale, parts[1] / scale, parts[2] / scale]);
        r.validate()?;
        Ok(r)
    }
}

/// Assigns split tags by a seeded shuffle of row indices.
pub fn split(ds: &TabularDataset, ratios: SplitRatios, seed: u64) -> Result<TabularDataset> {
    ratios.validate()?;
    let n = ds.n_rows();
    if n < 3 {
        return invalid_arg(format!("cannot split {n} rows (need at least 3)"));
    }
    let (train, val, _) = ratios.counts(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut crate::rng_from_seed(seed));
    let mut tags = vec![SplitTag::Test; n];
    for (rank, &row) in order.iter().enumerate() {
        tags[row] = if rank < train {
            SplitTag::Train
        } else if rank < train + val {
            SplitTag::Val
        } else {
            SplitTag::Test
        };
    }
    ds.clone().with_split(tags)
}
