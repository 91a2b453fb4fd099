use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::store::{ColumnData, SplitTag, TabularDataset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FeatureEncoding {
    /// Standardized with training mean and standard deviation.
    Numeric { mean: f64, std: f64 },
    /// One-hot over the levels seen in training; anything else encodes as
    /// all zeros.
    Categorical { levels: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedFeature {
    pub name: String,
    #[serde(flatten)]
    pub encoding: FeatureEncoding,
}

impl EncodedFeature {
    pub fn width(&self) -> usize {
        match &self.encoding {
            FeatureEncoding::Numeric { .. } => 1,
            FeatureEncoding::Categorical { levels } => levels.len(),
        }
    }
}

/// Maps dataset rows to the network's input vector. Statistics come from
/// the training split only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureEncoder {
    pub features: Vec<EncodedFeature>,
}

impl FeatureEncoder {
    pub fn fit(ds: &TabularDataset) -> Result<Self> {
        let train = ds.rows(SplitTag::Train);
        if train.is_empty() {
            return Err(Error::InvalidData("no training rows".into()));
        }
        let features = ds
            .features()
            .map(|col| {
                let encoding = match &col.data {
                    ColumnData::Numeric(v) => {
                        let n = train.len() as f64;
                        let mean = train.iter().map(|&r| v[r]).sum::<f64>() / n;
                        let var = train.iter().map(|&r| (v[r] - mean).powi(2)).sum::<f64>() / n;
                        let std = if var > 0.0 { var.sqrt() } else { 1.0 };
                        FeatureEncoding::Numeric { mean, std }
                    }
                    ColumnData::Categorical { levels, codes } => {
                        let mut seen = vec![false; levels.len()];
                        for &r in &train {
                            seen[codes[r] as usize] = true;
                        }
                        FeatureEncoding::Categorical {
                            levels: levels
                                .iter()
                                .zip(seen)
                                .filter(|(_, s)| *s)
                                .map(|(l, _)| l.clone())
                                .collect(),
                        }
                    }
                };
                EncodedFeature {
                    name: col.name.clone(),
                    encoding,
                }
            })
            .collect();
        Ok(FeatureEncoder { features })
    }

    pub fn width(&self) -> usize {
        self.features.iter().map(EncodedFeature::width).sum()
    }

    /// Input-vector positions belonging to each original variable.
    pub fn groups(&self) -> Vec<(String, Range<usize>)> {
        let mut start = 0;
        self.features
            .iter()
            .map(|f| {
                let r = start..start + f.width();
                start = r.end;
                (f.name.clone(), r)
            })
            .collect()
    }

    /// Encodes every row of `ds`; row-major `n_rows × width`.
    pub fn encode(&self, ds: &TabularDataset) -> Result<Vec<f64>> {
        let n = ds.n_rows();
        let width = self.width();
        let mut out = vec![0.0; n * width];
        let mut offset = 0;
        for f in &self.features {
            let col = ds.column(&f.name)?;
            match (&f.encoding, &col.data) {
                (FeatureEncoding::Numeric { mean, std }, ColumnData::Numeric(v)) => {
                    for r in 0..n {
                        out[r * width + offset] = (v[r] - mean) / std;
                    }
                }
                (FeatureEncoding::Categorical { levels: seen }, ColumnData::Categorical { levels, codes }) => {
                    let slot: Vec<Option<usize>> = levels
                        .iter()
                        .map(|l| seen.iter().position(|s| s == l))
                        .collect();
                    for r in 0..n {
                        if let Some(k) = slot[codes[r] as usize] {
                            out[r * width + offset + k] = 1.0;
                        }
                    }
                }
                _ => {
                    return Err(Error::InvalidData(format!(
                        "column `{}` kind differs from the encoder",
                        f.name
                    )))
                }
            }
            offset += f.width();
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::Column;

    #[test]
    fn standardizes_and_one_hots() {
        let cols = vec![
            Column::numeric("a", vec![1.0, 3.0, 1.0, 3.0]),
            Column::categorical("c", vec!["p".into(), "q".into(), "r".into()], vec![0, 1, 0, 2]),
            Column::binary("y", vec![0, 1, 0, 1]),
        ];
        let ds = TabularDataset::new(cols, "y", "1").unwrap();
        let ds = ds
            .with_split(vec![SplitTag::Train, SplitTag::Train, SplitTag::Train, SplitTag::Test])
            .unwrap();
        let enc = FeatureEncoder::fit(&ds).unwrap();
        // level `r` only appears in the test row.
        assert_eq!(enc.width(), 3);
        let x = enc.encode(&ds).unwrap();
        let mean = 5.0 / 3.0;
        let std = ((2.0 * (1.0f64 - mean).powi(2) + (3.0 - mean).powi(2)) / 3.0).sqrt();
        assert!((x[0] - (1.0 - mean) / std).abs() < 1e-12);
        assert_eq!(&x[1..3], &[1.0, 0.0]);
        assert_eq!(&x[4..6], &[0.0, 1.0]);
        assert_eq!(&x[10..12], &[0.0, 0.0]);
        assert_eq!(enc.groups()[1], ("c".to_string(), 1..3));
    }
}
