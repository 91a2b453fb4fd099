//! Minimal directed acyclic graph over named nodes.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    names: Vec<String>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    /// Builds a DAG from per-node parent lists. Fails on cycles or
    /// out-of-range parent indices.
    pub fn new(names: Vec<String>, parents: Vec<Vec<usize>>) -> Result<Self> {
        if names.len() != parents.len() {
            return Err(Error::DimensionMismatch {
                expected: names.len(),
                got: parents.len(),
            });
        }
        let n = names.len();
        let mut children = vec![Vec::new(); n];
        for (child, ps) in parents.iter().enumerate() {
            for &p in ps {
                if p >= n {
                    return Err(Error::InvalidNetwork(format!(
                        "parent index {p} of `{}` out of range",
                        names[child]
                    )));
                }
                if p == child {
                    return Err(Error::InvalidNetwork(format!(
                        "self loop on `{}`",
                        names[child]
                    )));
                }
                children[p].push(child);
            }
        }
        let dag = Dag {
            names,
            parents,
            children,
        };
        if dag.try_topological_order().is_none() {
            return Err(Error::InvalidNetwork("cycle detected".into()));
        }
        Ok(dag)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn parents_of(&self, idx: usize) -> &[usize] {
        &self.parents[idx]
    }

    pub fn children_of(&self, idx: usize) -> &[usize] {
        &self.children[idx]
    }

    pub fn n_edges(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.parents[to].contains(&from)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    fn try_topological_order(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Kahn order; ties resolved by declaration order.
    pub fn topological_order(&self) -> Vec<usize> {
        self.try_topological_order()
            .expect("acyclicity checked at construction")
    }

    /// Proper ancestors of `idx`.
    pub fn ancestors(&self, idx: usize) -> BTreeSet<usize> {
        self.walk(idx, |v| &self.parents[v], usize::MAX)
    }

    /// Ancestors at most `depth` generations back.
    pub fn ancestors_within(&self, idx: usize, depth: usize) -> BTreeSet<usize> {
        self.walk(idx, |v| &self.parents[v], depth)
    }

    /// Proper descendants of `idx`.
    pub fn descendants(&self, idx: usize) -> BTreeSet<usize> {
        self.walk(idx, |v| &self.children[v], usize::MAX)
    }

    fn walk<'a>(
        &'a self,
        start: usize,
        next: impl Fn(usize) -> &'a [usize],
        depth: usize,
    ) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut frontier = vec![start];
        let mut level = 0;
        while !frontier.is_empty() && level < depth {
            let mut nxt = Vec::new();
            for v in frontier {
                for &u in next(v) {
                    if seen.insert(u) {
                        nxt.push(u);
                    }
                }
            }
            frontier = nxt;
            level += 1;
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("V{i}")).collect()
    }

    #[test]
    fn rejects_cycle() {
        let err = Dag::new(names(3), vec![vec![2], vec![0], vec![1]]).unwrap_err();
        assert!(matches!(err, Error::InvalidNetwork(_)));
    }

    #[test]
    fn ancestry_on_chain() {
        // V0 -> V1 -> V2 -> V3
        let dag = Dag::new(names(4), vec![vec![], vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(dag.ancestors(3), BTreeSet::from([0, 1, 2]));
        assert_eq!(dag.ancestors_within(3, 2), BTreeSet::from([1, 2]));
        assert_eq!(dag.descendants(1), BTreeSet::from([2, 3]));
        assert_eq!(dag.topological_order(), vec![0, 1, 2, 3]);
    }
}
