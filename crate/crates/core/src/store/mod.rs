//! Typed tabular data: columns, train/val/test splits, discretization and
//! the on-disk CSV + metadata format.

mod dataset;
mod discrete;
mod discretize;
pub mod io;
mod split;

pub use dataset::{Column, ColumnData, ColumnKind, SplitTag, TabularDataset};
pub use discrete::DiscreteTable;
pub use discretize::{ColumnBins, ColumnDiscretizer, Discretizer, NumericBins, DEFAULT_BINS};
pub use split::{split, SplitRatios};
