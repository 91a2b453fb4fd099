//! ReLU classifier with an explicit view of the layer feeding the output
//! unit.

mod encode;
mod metrics;
mod model;
mod train;

pub use encode::{EncodedFeature, FeatureEncoder, FeatureEncoding};
pub use metrics::pr_auc;
pub use model::{sigmoid, split_signs, Dense, MlpModel, NnluView, Selection};
pub use train::{loss_and_gradients, train, TrainConfig};
