use std::collections::{BTreeSet, VecDeque};

use crate::error::{invalid_arg, Result};
use crate::graph::Dag;

/// Whether `a` and `b` are d-separated by `cond` in `dag`, by reachability
/// over active trails.
pub fn d_separated(dag: &Dag, a: usize, b: usize, cond: &[usize]) -> Result<bool> {
    let n = dag.len();
    if a >= n || b >= n || cond.iter().any(|&c| c >= n) {
        return invalid_arg("node index out of range");
    }
    if a == b {
        return invalid_arg("d-separation needs two distinct nodes");
    }
    if cond.contains(&a) || cond.contains(&b) {
        return invalid_arg("conditioning set contains an endpoint");
    }
    let observed: BTreeSet<usize> = cond.iter().copied().collect();
    // Nodes with an observed descendant (or observed themselves) open colliders.
    let mut opens = observed.clone();
    let mut stack: Vec<usize> = cond.to_vec();
    while let Some(v) = stack.pop() {
        for &p in dag.parents_of(v) {
            if opens.insert(p) {
                stack.push(p);
            }
        }
    }
    // State: (node, arrived from a child = travelling up).
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([(a, true)]);
    while let Some((v, up)) = queue.pop_front() {
        if !seen.insert((v, up)) {
            continue;
        }
        if v == b {
            return Ok(false);
        }
        let obs = observed.contains(&v);
        if up && !obs {
            queue.extend(dag.parents_of(v).iter().map(|&p| (p, true)));
            queue.extend(dag.children_of(v).iter().map(|&c| (c, false)));
        } else if !up {
            if !obs {
                queue.extend(dag.children_of(v).iter().map(|&c| (c, false)));
            }
            if opens.contains(&v) {
                queue.extend(dag.parents_of(v).iter().map(|&p| (p, true)));
            }
        }
    }
    Ok(true)
}
