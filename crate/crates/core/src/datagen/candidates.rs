use std::collections::BTreeSet;

use super::{BayesNet, GroundTruth};
use crate::error::{invalid_arg, Result};

const ANCESTOR_GENERATIONS: usize = 3;

/// Candidate explanatory variables for predicting `target` from a known
/// network: ancestors up to three generations back, children, the other
/// parents of those children, and the other children of the target's
/// parents (pseudo-correlates). The target's parents form the single
/// important set.
pub fn build_candidates(bn: &BayesNet, target: &str) -> Result<GroundTruth> {
    let t = bn.index_of(target)?;
    if bn.card(t) != 2 {
        return invalid_arg(format!(
            "target `{target}` has {} states; a binary node is required",
            bn.card(t)
        ));
    }
    let dag = bn.dag();
    let mut set: BTreeSet<usize> = dag.ancestors_within(t, ANCESTOR_GENERATIONS);
    for &c in dag.children_of(t) {
        set.insert(c);
        set.extend(dag.parents_of(c));
    }
    for &p in dag.parents_of(t) {
        set.extend(dag.children_of(p));
    }
    set.remove(&t);
    let names = |ids: &mut dyn Iterator<Item = usize>| -> Vec<String> {
        ids.map(|i| dag.name(i).to_string()).collect()
    };
    let parents = names(&mut dag.parents_of(t).iter().copied());
    Ok(GroundTruth {
        important_sets: vec![parents.clone()],
        per_row: None,
        candidate_vars: names(&mut set.into_iter()),
        parents_of_target: parents,
    })
}
