use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    /// Codes index into `levels`.
    Categorical { levels: Vec<String>, codes: Vec<u32> },
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ColumnKind {
        match self {
            ColumnData::Numeric(_) => ColumnKind::Numeric,
            ColumnData::Categorical { .. } => ColumnKind::Categorical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub data: ColumnData,
}

impl Column {
    pub fn numeric(name: impl Into<String>, values: Vec<f64>) -> Self {
        Column {
            name: name.into(),
            data: ColumnData::Numeric(values),
        }
    }

    pub fn categorical(name: impl Into<String>, levels: Vec<String>, codes: Vec<u32>) -> Self {
        Column {
            name: name.into(),
            data: ColumnData::Categorical { levels, codes },
        }
    }

    /// Binary 0/1 column with levels `"0"` and `"1"`.
    pub fn binary(name: impl Into<String>, bits: Vec<u32>) -> Self {
        Self::categorical(name, vec!["0".into(), "1".into()], bits)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Text form of a cell as written to CSV.
    pub fn cell_text(&self, row: usize) -> String {
        match &self.data {
            ColumnData::Numeric(v) => format!("{}", v[row]),
            ColumnData::Categorical { levels, codes } => levels[codes[row] as usize].clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitTag {
    Train,
    Val,
    Test,
}

impl SplitTag {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(SplitTag::Train),
            "val" => Ok(SplitTag::Val),
            "test" => Ok(SplitTag::Test),
            other => invalid_arg(format!("unknown split `{other}` (train|val|test)")),
        }
    }
}

/// Column-typed sample table with a binary target and per-row split tags.
///
/// Immutable once built; splitting returns a new table.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularDataset {
    columns: Vec<Column>,
    target: usize,
    positive_level: u32,
    split: Vec<SplitTag>,
}

impl TabularDataset {
    /// `positive` names the target level treated as the positive class.
    pub fn new(columns: Vec<Column>, target: &str, positive: &str) -> Result<Self> {
        let n = columns.first().map(Column::len).unwrap_or(0);
        if n == 0 {
            return Err(Error::InvalidData("dataset has no rows".into()));
        }
        if let Some(c) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::InvalidData(format!(
                "column `{}` has {} rows, expected {n}",
                c.name,
                c.len()
            )));
        }
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].iter().any(|o| o.name == c.name) {
                return Err(Error::InvalidData(format!("duplicate column `{}`", c.name)));
            }
        }
        let t = columns
            .iter()
            .position(|c| c.name == target)
            .ok_or_else(|| Error::UnknownVariable(target.to_string()))?;
        let positive_level = match &columns[t].data {
            ColumnData::Categorical { levels, .. } if levels.len() == 2 => levels
                .iter()
                .position(|l| l == positive)
                .ok_or_else(|| {
                    Error::InvalidData(format!("target has no level `{positive}`"))
                })? as u32,
            _ => {
                return Err(Error::InvalidData(format!(
                    "target `{target}` must be a two-level categorical column"
                )))
            }
        };
        Ok(TabularDataset {
            columns,
            target: t,
            positive_level,
            split: vec![SplitTag::Train; n],
        })
    }

    pub fn with_split(mut self, split: Vec<SplitTag>) -> Result<Self> {
        if split.len() != self.n_rows() {
            return Err(Error::DimensionMismatch {
                expected: self.n_rows(),
                got: split.len(),
            });
        }
        self.split = split;
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.split.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn target_name(&self) -> &str {
        &self.columns[self.target].name
    }

    pub fn target_column(&self) -> &Column {
        &self.columns[self.target]
    }

    pub fn positive_label(&self) -> &str {
        match &self.columns[self.target].data {
            ColumnData::Categorical { levels, .. } => &levels[self.positive_level as usize],
            ColumnData::Numeric(_) => unreachable!("target validated as categorical"),
        }
    }

    /// Feature columns in declaration order (everything except the target).
    pub fn features(&self) -> impl Iterator<Item = &Column> {
        let t = self.target;
        self.columns
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != t)
            .map(|(_, c)| c)
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.features().map(|c| c.name.clone()).collect()
    }

    /// 1 for the positive class, 0 otherwise.
    pub fn labels(&self) -> Vec<u8> {
        match &self.columns[self.target].data {
            ColumnData::Categorical { codes, .. } => codes
                .iter()
                .map(|&c| u8::from(c == self.positive_level))
                .collect(),
            ColumnData::Numeric(_) => unreachable!("target validated as categorical"),
        }
    }

    pub fn split_tags(&self) -> &[SplitTag] {
        &self.split
    }

    pub fn rows(&self, tag: SplitTag) -> Vec<usize> {
        self.split
            .iter()
            .enumerate()
            .filter(|(_, t)| **t == tag)
            .map(|(i, _)| i)
            .collect()
    }

    /// (train, val, test) row counts.
    pub fn split_counts(&self) -> (usize, usize, usize) {
        self.split.iter().fold((0, 0, 0), |(a, b, c), t| match t {
            SplitTag::Train => (a + 1, b, c),
            SplitTag::Val => (a, b + 1, c),
            SplitTag::Test => (a, b, c + 1),
        })
    }

    /// Keeps only the named columns (plus the target), preserving their order.
    pub fn project(&self, keep: &[String]) -> Result<Self> {
        let mut columns = Vec::with_capacity(keep.len() + 1);
        for name in keep {
            if name == self.target_name() {
                continue;
            }
            columns.push(self.column(name)?.clone());
        }
        columns.push(self.target_column().clone());
        let positive = self.positive_label().to_string();
        let target = self.target_name().to_string();
        TabularDataset::new(columns, &target, &positive)?.with_split(self.split.clone())
    }
}
