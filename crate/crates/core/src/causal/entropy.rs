//! Exact discrete distributions and conditional entropies, used as oracles.

use crate::datagen::BayesNet;
use crate::error::{Error, Result};
use crate::graph::Dag;

/// Full joint distribution in mixed radix (last variable fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    cards: Vec<usize>,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn new(cards: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let size: usize = cards.iter().product();
        if probs.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                got: probs.len(),
            });
        }
        if probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::InvalidData("probabilities must lie in [0, 1]".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidData(format!(
                "joint distribution sums to {total}, not 1"
            )));
        }
        Ok(JointTable { cards, probs })
    }

    /// Product of the network's conditional tables over every assignment.
    pub fn from_bn(bn: &BayesNet) -> Result<Self> {
        let cards: Vec<usize> = (0..bn.len()).map(|i| bn.card(i)).collect();
        let size: usize = cards.iter().product();
        let mut probs = Vec::with_capacity(size);
        let mut states = vec![0usize; cards.len()];
        for _ in 0..size {
            let mut p = 1.0;
            for v in 0..cards.len() {
                let ps: Vec<usize> = bn.cpt(v).parents.iter().map(|&q| states[q]).collect();
                p *= bn.prob(v, &ps, states[v]);
            }
            probs.push(p);
            for v in (0..cards.len()).rev() {
                states[v] += 1;
                if states[v] < cards[v] {
                    break;
                }
                states[v] = 0;
            }
        }
        JointTable::new(cards, probs)
    }

    pub fn n_vars(&self) -> usize {
        self.cards.len()
    }

    /// Marginal probabilities over `vars` (in the given order).
    pub fn marginal(&self, vars: &[usize]) -> Vec<f64> {
        let size: usize = vars.iter().map(|&v| self.cards[v]).product();
        let mut out = vec![0.0; size];
        let mut states = vec![0usize; self.cards.len()];
        for &p in &self.probs {
            let k = vars.iter().fold(0, |acc, &v| acc * self.cards[v] + states[v]);
            out[k] += p;
            for v in (0..self.cards.len()).rev() {
                states[v] += 1;
                if states[v] < self.cards[v] {
                    break;
                }
                states[v] = 0;
            }
        }
        out
    }

    /// Shannon entropy (nats) of the marginal over `vars`.
    pub fn entropy(&self, vars: &[usize]) -> f64 {
        self.marginal(vars)
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.ln())
            .sum()
    }

    /// `H(x | cond)` in nats.
    pub fn cond_entropy(&self, x: usize, cond: &[usize]) -> f64 {
        let mut both = cond.to_vec();
        both.push(x);
        (self.entropy(&both) - self.entropy(cond)).max(0.0)
    }
}

/// Exhaustive minimum of `H(x | S)` over `allowed`; the first minimizer in
/// iteration order is returned.
pub fn min_cond_entropy(joint: &JointTable, x: usize, allowed: &[Vec<usize>]) -> Result<(Vec<usize>, f64)> {
    if x >= joint.n_vars() {
        return Err(Error::InvalidArgument(format!("variable {x} out of range")));
    }
    allowed
        .iter()
        .map(|s| (s.clone(), joint.cond_entropy(x, s)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::InvalidArgument("no conditioning sets given".into()))
}

/// Every `S` with `parents(x) ⊆ S ⊆ V \ {x}` that contains no descendant of
/// `x`, so `x` is not an ancestor of any member.
pub fn valid_conditioning_sets(dag: &Dag, x: usize) -> Vec<Vec<usize>> {
    let desc = dag.descendants(x);
    let parents = dag.parents_of(x);
    let free: Vec<usize> = (0..dag.len())
        .filter(|&v| v != x && !desc.contains(&v) && !parents.contains(&v))
        .collect();
    (0u64..1 << free.len())
        .map(|mask| {
            let mut s: Vec<usize> = parents.to_vec();
            s.extend((0..free.len()).filter(|i| mask >> i & 1 == 1).map(|i| free[i]));
            s.sort_unstable();
            s
        })
        .collect()
}
