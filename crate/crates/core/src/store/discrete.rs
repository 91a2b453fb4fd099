use super::{Column, ColumnData};
use crate::error::{Error, Result};

/// Column-major table of small non-negative codes with known cardinalities.
///
/// This is the common currency of the causal and explanation modules.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiscreteTable {
    names: Vec<String>,
    cards: Vec<usize>,
    codes: Vec<Vec<u32>>,
}

impl DiscreteTable {
    pub fn new(names: Vec<String>, cards: Vec<usize>, codes: Vec<Vec<u32>>) -> Result<Self> {
        let mut t = DiscreteTable::default();
        if names.len() != cards.len() || names.len() != codes.len() {
            return Err(Error::DimensionMismatch {
                expected: names.len(),
                got: codes.len(),
            });
        }
        for ((n, c), v) in names.into_iter().zip(cards).zip(codes) {
            t.push(&n, c, v)?;
        }
        Ok(t)
    }

    /// Table of categorical columns, codes taken as-is.
    pub fn from_categorical(columns: &[Column]) -> Result<Self> {
        let mut t = DiscreteTable::default();
        for c in columns {
            match &c.data {
                ColumnData::Categorical { levels, codes } => t.push(&c.name, levels.len(), codes.clone())?,
                ColumnData::Numeric(_) => {
                    return Err(Error::InvalidData(format!("column `{}` is numeric", c.name)))
                }
            }
        }
        Ok(t)
    }

    pub fn push(&mut self, name: &str, card: usize, codes: Vec<u32>) -> Result<()> {
        if let Some(first) = self.codes.first() {
            if first.len() != codes.len() {
                return Err(Error::DimensionMismatch {
                    expected: first.len(),
                    got: codes.len(),
                });
            }
        }
        if self.names.iter().any(|n| n == name) {
            return Err(Error::InvalidData(format!("duplicate column `{name}`")));
        }
        if let Some(&bad) = codes.iter().find(|&&c| c as usize >= card.max(1)) {
            return Err(Error::InvalidData(format!(
                "code {bad} out of range for `{name}` with {card} states"
            )));
        }
        self.names.push(name.to_string());
        self.cards.push(card.max(1));
        self.codes.push(codes);
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.codes.first().map(Vec::len).unwrap_or(0)
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn card(&self, idx: usize) -> usize {
        self.cards[idx]
    }

    pub fn codes(&self, idx: usize) -> &[u32] {
        &self.codes[idx]
    }

    /// New table restricted to the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> DiscreteTable {
        DiscreteTable {
            names: self.names.clone(),
            cards: self.cards.clone(),
            codes: self
                .codes
                .iter()
                .map(|col| rows.iter().map(|&r| col[r]).collect())
                .collect(),
        }
    }
}
