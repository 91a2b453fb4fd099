//! Local explanations: entropy-based explanation power (EEP) of input
//! configurations for each NNLU neuron, combined into positive, negative
//! and total explanation power (PEP, NEP, TEP).

mod cache;
mod local;
mod score;

use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Result};

pub use cache::{subsets_up_to, EepCache, NeuronCache, RowContext, SubsetTable};
pub use local::{candidate_subsets, explain_rows, explanation_for, local_explain, value_label, ExplanationList};
pub use score::{
    combine, eep, emi, emi_from_joint, tep_score, ConfigItem, Explanation, NeuronContribution, TepParts,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExplainConfig {
    /// Largest configuration size.
    pub m: usize,
    /// Additive smoothing on cached counts; zero disables it.
    pub smoothing: f64,
    /// Keep only each neuron's top-K CCV subsets by EMI.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emi_topk: Option<usize>,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        ExplainConfig {
            m: 2,
            smoothing: 1.0,
            emi_topk: None,
        }
    }
}

impl ExplainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return invalid_arg("m must be at least 1");
        }
        if !(self.smoothing >= 0.0 && self.smoothing.is_finite()) {
            return invalid_arg("smoothing must be a non-negative number");
        }
        if self.emi_topk == Some(0) {
            return invalid_arg("emi_topk must be at least 1");
        }
        Ok(())
    }
}
