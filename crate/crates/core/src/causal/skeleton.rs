use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::g2_test;
use crate::error::{invalid_arg, Result};
use crate::store::DiscreteTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkeletonConfig {
    pub alpha: f64,
    pub max_cond: usize,
}

impl Default for SkeletonConfig {
    fn default() -> Self {
        SkeletonConfig {
            alpha: 0.01,
            max_cond: 3,
        }
    }
}

/// Edges incident to one target, with a separating set for every removed
/// edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skeleton {
    pub target: String,
    /// Variables that may enter conditioning sets.
    pub candidates: Vec<String>,
    /// Variables tested for adjacency but never conditioned on.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tested_only: Vec<String>,
    /// Variables still adjacent to the target, in table order.
    pub adjacent: Vec<String>,
    /// Separating set for each non-adjacent variable.
    pub sepsets: BTreeMap<String, Vec<String>>,
    pub n_tests: usize,
}

impl Skeleton {
    pub fn is_adjacent(&self, name: &str) -> bool {
        self.adjacent.iter().any(|a| a == name)
    }
}

/// Calls `f` on every `k`-subset of `pool` in lexicographic order until it
/// returns `true`.
fn any_subset(pool: &[usize], k: usize, mut f: impl FnMut(&[usize]) -> Result<bool>) -> Result<bool> {
    if k > pool.len() {
        return Ok(false);
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf = vec![0; k];
    loop {
        for (b, &i) in buf.iter_mut().zip(&idx) {
            *b = pool[i];
        }
        if f(&buf)? {
            return Ok(true);
        }
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(false);
            }
            i -= 1;
            if idx[i] < pool.len() - k + i {
                break;
            }
            if i == 0 {
                return Ok(false);
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// PC-stable adjacency search restricted to edges incident to `target`.
///
/// At level `l`, each remaining neighbour `x` is tested against every
/// `l`-subset of the target's other neighbours as they stood when the level
/// began (candidates only). The edge is removed at the first independence.
/// A conditional test with zero degrees of freedom is uninformative and
/// never removes an edge.
pub fn skeleton_search(
    table: &DiscreteTable,
    target: usize,
    candidates: &[usize],
    tested_only: &[usize],
    cfg: SkeletonConfig,
) -> Result<Skeleton> {
    if !(0.0..=1.0).contains(&cfg.alpha) {
        return invalid_arg(format!("alpha {} is outside [0, 1]", cfg.alpha));
    }
    if candidates.contains(&target) || tested_only.contains(&target) {
        return invalid_arg("the target cannot be its own candidate");
    }
    let mut adj: Vec<usize> = candidates.iter().chain(tested_only).copied().collect();
    adj.sort_unstable();
    adj.dedup();
    let mut sepsets = BTreeMap::new();
    let mut n_tests = 0;
    for level in 0..=cfg.max_cond {
        let snapshot = adj.clone();
        let mut any_pool = false;
        for &x in &snapshot {
            let pool: Vec<usize> = snapshot
                .iter()
                .copied()
                .filter(|&v| v != x && candidates.contains(&v))
                .collect();
            if pool.len() < level {
                continue;
            }
            any_pool = true;
            let mut found = None;
            any_subset(&pool, level, |s| {
                n_tests += 1;
                let r = g2_test(table, x, target, s, cfg.alpha)?;
                if r.independent && (s.is_empty() || r.dof > 0) {
                    found = Some(s.to_vec());
                    return Ok(true);
                }
                Ok(false)
            })?;
            if let Some(s) = found {
                adj.retain(|&v| v != x);
                sepsets.insert(
                    table.names()[x].clone(),
                    s.iter().map(|&v| table.names()[v].clone()).collect(),
                );
            }
        }
        if !any_pool {
            break;
        }
    }
    let names = |v: &[usize]| v.iter().map(|&i| table.names()[i].clone()).collect::<Vec<_>>();
    Ok(Skeleton {
        target: table.names()[target].clone(),
        candidates: names(candidates),
        tested_only: names(tested_only),
        adjacent: names(&adj),
        sepsets,
        n_tests,
    })
}

/// Characteristic correlated variables: candidates still adjacent to the
/// target.
pub fn extract_ccv(skel: &Skeleton) -> Vec<String> {
    skel.adjacent
        .iter()
        .filter(|a| skel.candidates.contains(a))
        .cloned()
        .collect()
}
