//! Causal explanations for neural-network predictors on tabular data.
//!
//! The pipeline trains a small ReLU classifier, treats each neuron of the
//! layer feeding the output unit (the "nearest-neighbour latent unit") as a
//! random variable, finds the input variables that stay dependent on it under
//! every conditioning set (its characteristic correlated variables), and then
//! scores single- and multi-variable explanations for individual rows with
//! entropy-based explanation powers.
//!
//! Modules follow the pipeline order:
//!
//! - [`datagen`]: synthetic generators and Bayesian-network files/sampling
//! - [`store`]: typed tabular data, splits and equal-frequency discretization
//! - [`mlp`]: the classifier, Adam training and PR-AUC model selection
//! - [`causal`]: G² tests, target-restricted PC skeletons, CCV extraction,
//!   and exact oracles (d-separation, conditional entropy)
//! - [`explain`]: EEP cache and PEP/NEP/TEP scoring
//! - [`harness`]: ranking metrics, a local-linear baseline, significance
//!   tests, and the end-to-end experiment runner
//! - [`cli`]: the `cennet` command-line front end

pub mod causal;
pub mod cli;
pub mod datagen;
pub mod error;
pub mod explain;
pub mod graph;
pub mod harness;
pub mod mlp;
pub mod store;

pub use error::{Error, ErrorClass, Result};

/// Seedable RNG used everywhere. Each operation owns its own stream.
pub type Rng = rand_chacha::ChaCha8Rng;

pub(crate) fn rng_from_seed(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}
