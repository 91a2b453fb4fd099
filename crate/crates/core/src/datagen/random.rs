use rand::seq::index::sample;
use rand::Rng as _;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::{BayesNet, Cpt, Variable};
use crate::error::{invalid_arg, Result};

/// Shape of a random network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomNetSpec {
    pub n_nodes: usize,
    /// States per node are drawn from `2..=max_states`.
    pub max_states: usize,
    pub max_parents: usize,
    /// Chance that a node gets parents at all.
    pub edge_prob: f64,
    pub seed: u64,
}

impl Default for RandomNetSpec {
    fn default() -> Self {
        RandomNetSpec {
            n_nodes: 6,
            max_states: 3,
            max_parents: 3,
            edge_prob: 0.7,
            seed: 0,
        }
    }
}

/// Random network with nodes `V1..Vn` in topological order. Every row of
/// every table is drawn from a flat Dirichlet. The last node always has at
/// least one parent and never has children.
pub fn random_network(spec: &RandomNetSpec) -> Result<BayesNet> {
    if spec.n_nodes < 2 || spec.max_states < 2 || !(0.0..=1.0).contains(&spec.edge_prob) {
        return invalid_arg("random network needs 2+ nodes, 2+ states and edge_prob in [0, 1]");
    }
    let mut rng = crate::rng_from_seed(spec.seed);
    let n = spec.n_nodes;
    let cards: Vec<usize> = (0..n).map(|_| rng.random_range(2..=spec.max_states)).collect();
    let variables: Vec<Variable> = (0..n)
        .map(|i| Variable {
            name: format!("V{}", i + 1),
            states: (0..cards[i]).map(|s| format!("s{s}")).collect(),
        })
        .collect();
    let cpts = (0..n)
        .map(|i| {
            let last = i == n - 1;
            let k_max = spec.max_parents.min(i);
            let k = if k_max == 0 || (!last && !rng.random_bool(spec.edge_prob)) {
                0
            } else {
                rng.random_range(1..=k_max)
            };
            let mut parents: Vec<usize> = sample(&mut rng, i, k).into_vec();
            parents.sort_unstable();
            let n_rows: usize = parents.iter().map(|&p| cards[p]).product();
            let rows = (0..n_rows)
                .map(|_| {
                    let g: Vec<f64> = (0..cards[i]).map(|_| Exp1.sample(&mut rng)).collect();
                    let s: f64 = g.iter().sum();
                    g.into_iter().map(|v: f64| v / s).collect()
                })
                .collect();
            Cpt { parents, rows }
        })
        .collect();
    BayesNet::new(format!("random{}", spec.seed), variables, cpts)
}
