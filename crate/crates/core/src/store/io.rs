//! On-disk dataset format: `data.csv` (header = variable names, target in
//! the last column) next to a `meta.json` describing column kinds, the
//! generating source, the split, and the ground truth.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{split, Column, ColumnData, ColumnKind, SplitRatios, TabularDataset};
use crate::datagen::{GroundTruth, SyntheticKind};
use crate::error::{Error, Result};

pub const DATA_FILE: &str = "data.csv";
pub const META_FILE: &str = "meta.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum DataSource {
    Synthetic {
        kind: SyntheticKind,
        seed: u64,
        n_features: usize,
    },
    BayesNet {
        network: String,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMeta {
    pub name: String,
    pub kind: ColumnKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitMeta {
    pub ratios: SplitRatios,
    pub seed: u64,
    /// Train, validation and test row counts.
    pub counts: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub source: DataSource,
    pub n_rows: usize,
    pub target: String,
    pub positive_label: String,
    pub columns: Vec<ColumnMeta>,
    /// Constant subtracted from the score before the logistic link, when
    /// the generator centers it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centering: Option<f64>,
    pub split: SplitMeta,
    pub ground_truth: GroundTruth,
}

impl DatasetMeta {
    pub fn describe(
        ds: &TabularDataset,
        source: DataSource,
        centering: Option<f64>,
        ratios: SplitRatios,
        split_seed: u64,
        ground_truth: GroundTruth,
    ) -> Self {
        let columns = ordered_columns(ds)
            .into_iter()
            .map(|c| ColumnMeta {
                name: c.name.clone(),
                kind: c.data.kind(),
                levels: match &c.data {
                    ColumnData::Categorical { levels, .. } => levels.clone(),
                    ColumnData::Numeric(_) => Vec::new(),
                },
            })
            .collect();
        let (a, b, c) = ds.split_counts();
        DatasetMeta {
            source,
            n_rows: ds.n_rows(),
            target: ds.target_name().to_string(),
            positive_label: ds.positive_label().to_string(),
            columns,
            centering,
            split: SplitMeta {
                ratios,
                seed: split_seed,
                counts: [a, b, c],
            },
            ground_truth,
        }
    }
}

/// Features in declaration order, then the target.
fn ordered_columns(ds: &TabularDataset) -> Vec<&Column> {
    ds.features()
        .chain(std::iter::once(ds.target_column()))
        .collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_dataset(dir: &Path, ds: &TabularDataset, meta: &DatasetMeta) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(DATA_FILE);
    let cols = ordered_columns(ds);
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(cols.iter().map(|c| c.name.as_str()))?;
    for r in 0..ds.n_rows() {
        w.write_record(cols.iter().map(|c| c.cell_text(r)))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    write_json(&dir.join(META_FILE), meta)
}

/// Reads a dataset directory and re-derives its split from the metadata.
pub fn read_dataset(dir: &Path) -> Result<(TabularDataset, DatasetMeta)> {
    let meta: DatasetMeta = read_json(&dir.join(META_FILE))?;
    let path = dir.join(DATA_FILE);
    let mut rdr = csv::Reader::from_path(&path)?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let expected: Vec<&str> = meta.columns.iter().map(|c| c.name.as_str()).collect();
    if header != expected {
        return Err(Error::InvalidData(format!(
            "{}: header {:?} does not match metadata {:?}",
            path.display(),
            header,
            expected
        )));
    }
    let mut numeric: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    let mut codes: Vec<Vec<u32>> = vec![Vec::new(); header.len()];
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for (j, cm) in meta.columns.iter().enumerate() {
            let cell = rec.get(j).ok_or_else(|| {
                Error::InvalidData(format!("{}: row {} is short", path.display(), line + 2))
            })?;
            match cm.kind {
                ColumnKind::Numeric => numeric[j].push(cell.parse().map_err(|_| {
                    Error::InvalidData(format!(
                        "{}: row {}: `{cell}` is not a number",
                        path.display(),
                        line + 2
                    ))
                })?),
                ColumnKind::Categorical => {
                    let code = cm.levels.iter().position(|l| l == cell).ok_or_else(|| {
                        Error::InvalidData(format!(
                            "{}: row {}: unknown level `{cell}` for `{}`",
                            path.display(),
                            line + 2,
                            cm.name
                        ))
                    })?;
                    codes[j].push(code as u32);
                }
            }
        }
    }
    let columns = meta
        .columns
        .iter()
        .enumerate()
        .map(|(j, cm)| match cm.kind {
            ColumnKind::Numeric => Column::numeric(&cm.name, std::mem::take(&mut numeric[j])),
            ColumnKind::Categorical => {
                Column::categorical(&cm.name, cm.levels.clone(), std::mem::take(&mut codes[j]))
            }
        })
        .collect();
    let ds = TabularDataset::new(columns, &meta.target, &meta.positive_label)?;
    if ds.n_rows() != meta.n_rows {
        return Err(Error::InvalidData(format!(
            "{}: {} rows, metadata says {}",
            path.display(),
            ds.n_rows(),
            meta.n_rows
        )));
    }
    let ds = split(&ds, meta.split.ratios, meta.split.seed)?;
    let (a, b, c) = ds.split_counts();
    if [a, b, c] != meta.split.counts {
        return Err(Error::InvalidData("split counts do not match metadata".into()));
    }
    Ok((ds, meta))
}
