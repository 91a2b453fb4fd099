use rand::Rng as _;

use super::BayesNet;
use crate::error::{invalid_arg, Result};
use crate::store::{Column, TabularDataset};

/// Ancestral sampling: every row draws each node from its CPT after its
/// parents, in topological order. Returns one categorical column per node,
/// in declaration order.
pub fn sample_columns(bn: &BayesNet, n: usize, seed: u64) -> Result<Vec<Column>> {
    if n == 0 {
        return invalid_arg("sample size must be at least 1");
    }
    let order = bn.dag().topological_order();
    let mut rng = crate::rng_from_seed(seed);
    let mut codes = vec![Vec::with_capacity(n); bn.len()];
    let mut state = vec![0usize; bn.len()];
    let mut parent_states = Vec::new();
    for _ in 0..n {
        for &v in &order {
            parent_states.clear();
            parent_states.extend(bn.cpt(v).parents.iter().map(|&p| state[p]));
            let row = &bn.cpt(v).rows[bn.row_index(v, &parent_states)];
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut pick = row.len() - 1;
            for (s, &p) in row.iter().enumerate() {
                acc += p;
                if u < acc {
                    pick = s;
                    break;
                }
            }
            // Guard against rounding landing on a zero-probability last state.
            while row[pick] == 0.0 && pick > 0 {
                pick -= 1;
            }
            state[v] = pick;
        }
        for (v, col) in codes.iter_mut().enumerate() {
            col.push(state[v] as u32);
        }
    }
    Ok(bn
        .variables()
        .iter()
        .zip(codes)
        .map(|(var, c)| Column::categorical(&var.name, var.states.clone(), c))
        .collect())
}

/// Samples `n` rows and wraps them as a dataset with `target` as the label.
/// The target's first declared state is the positive class.
pub fn sample_bn(bn: &BayesNet, n: usize, seed: u64, target: &str) -> Result<TabularDataset> {
    let t = bn.index_of(target)?;
    if bn.card(t) != 2 {
        return invalid_arg(format!("target `{target}` is not binary"));
    }
    let positive = bn.variable(t).states[0].clone();
    TabularDataset::new(sample_columns(bn, n, seed)?, target, &positive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::parse_bn;
    use crate::store::ColumnData;

    fn codes(ds: &TabularDataset, name: &str) -> Vec<u32> {
        match &ds.column(name).unwrap().data {
            ColumnData::Categorical { codes, .. } => codes.clone(),
            ColumnData::Numeric(_) => panic!(),
        }
    }

    #[test]
    fn root_frequency_concentrates() {
        let bn = parse_bn(
            "network r;\nvariable R { states: s0, s1; }\nprobability ( R ) { table: 0.3, 0.7; }\n",
        )
        .unwrap();
        let ds = sample_bn(&bn, 100_000, 42, "R").unwrap();
        let f = codes(&ds, "R").iter().filter(|&&c| c == 0).count() as f64 / 1e5;
        assert!((f - 0.3).abs() < 0.01, "{f}");
    }

    #[test]
    fn one_hot_chain_is_deterministic_function() {
        let bn = parse_bn(
            "network d;
variable A { states: a, b; }
variable B { states: a, b; }
probability ( A ) { table: 0.5, 0.5; }
probability ( B | A ) { (a): 0.0, 1.0; (b): 1.0, 0.0; }
",
        )
        .unwrap();
        let ds = sample_bn(&bn, 1000, 3, "B").unwrap();
        let (a, b) = (codes(&ds, "A"), codes(&ds, "B"));
        assert!(a.iter().zip(&b).all(|(x, y)| *y == 1 - *x));
    }

    #[test]
    fn same_seed_same_sample() {
        let bn = parse_bn(
            "network r;\nvariable R { states: s0, s1; }\nprobability ( R ) { table: 0.3, 0.7; }\n",
        )
        .unwrap();
        assert_eq!(
            sample_bn(&bn, 500, 9, "R").unwrap(),
            sample_bn(&bn, 500, 9, "R").unwrap()
        );
        assert!(sample_bn(&bn, 0, 9, "R").is_err());
    }
}
