//! Conditional-independence testing, target-restricted skeleton search and
//! CCV extraction, with exact oracles for checking them.

mod citest;
mod dsep;
mod entropy;
mod global;
mod skeleton;

pub use citest::{g2_test, CiTestResult};
pub use dsep::d_separated;
pub use entropy::{min_cond_entropy, valid_conditioning_sets, JointTable};
pub use global::{global_explain, CausalConfig, CausalReport, NeuronReport};
pub use skeleton::{extract_ccv, skeleton_search, Skeleton, SkeletonConfig};
