//! Dataset generators: the three synthetic benchmarks and ancestral
//! sampling from Bayesian-network model files.

mod bn;
mod candidates;
mod random;
mod sample;
mod synthetic;

use serde::{Deserialize, Serialize};

pub use bn::{emit_bn, parse_bn, BayesNet, Cpt, Variable};
pub use candidates::build_candidates;
pub use random::{random_network, RandomNetSpec};
pub use sample::{sample_bn, sample_columns};
pub use synthetic::{
    additive_score, category_probability, generate, nonadditive_logit, Generated, SyntheticKind,
    SyntheticSpec, CATEGORY_TABLE,
};

/// Network files shipped with the crate.
pub const BUILTIN_NETWORKS: [(&str, &str); 3] = [
    ("alarm", include_str!("../../data/alarm.bn")),
    ("hailfinder", include_str!("../../data/hailfinder.bn")),
    ("insurance", include_str!("../../data/insurance.bn")),
];

/// Parses a shipped network by name.
pub fn builtin_network(name: &str) -> crate::Result<BayesNet> {
    let text = BUILTIN_NETWORKS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            crate::Error::InvalidArgument(format!(
                "unknown network `{name}` (alarm|hailfinder|insurance)"
            ))
        })?;
    parse_bn(text)
}

/// Which variables count as correct explanations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Sets considered correct for every row.
    pub important_sets: Vec<Vec<String>>,
    /// Row-specific important set, when it depends on the row's values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_row: Option<Vec<Vec<String>>>,
    /// Variables eligible for ranking.
    pub candidate_vars: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parents_of_target: Vec<String>,
}

impl GroundTruth {
    /// Important variables for `row`: the row-specific set if present,
    /// otherwise the union of the fixed sets in first-seen order.
    pub fn important_for_row(&self, row: usize) -> Vec<String> {
        if let Some(per_row) = &self.per_row {
            return per_row[row].clone();
        }
        let mut out: Vec<String> = Vec::new();
        for v in self.important_sets.iter().flatten() {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_networks_parse() {
        assert_eq!(builtin_network("alarm").unwrap().len(), 37);
        assert_eq!(builtin_network("insurance").unwrap().len(), 27);
        assert_eq!(builtin_network("hailfinder").unwrap().len(), 56);
        assert!(builtin_network("asia").is_err());
    }

    #[test]
    fn shipped_parent_sets() {
        let parents = |net: &str, v: &str| -> Vec<String> {
            let bn = builtin_network(net).unwrap();
            let i = bn.index_of(v).unwrap();
            let mut p: Vec<String> = bn.dag().parents_of(i).iter().map(|&j| bn.dag().name(j).to_string()).collect();
            p.sort();
            p
        };
        assert_eq!(parents("alarm", "HISTORY"), vec!["LVFAILURE"]);
        assert_eq!(parents("insurance", "Airbag"), vec!["MakeModel", "VehicleYear"]);
        assert_eq!(parents("insurance", "OtherCar"), vec!["SocioEcon"]);
    }
}
