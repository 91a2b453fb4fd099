use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{invalid_arg, Error, Result};
use crate::store::DiscreteTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiTestResult {
    pub g2: f64,
    pub dof: usize,
    pub p_value: f64,
    pub independent: bool,
}

/// Contingency counts of `a × b` within each occupied stratum of `cond`.
fn stratified_counts(table: &DiscreteTable, a: usize, b: usize, cond: &[usize]) -> Vec<Vec<u32>> {
    let n = table.n_rows();
    let (ca, cb) = (table.card(a), table.card(b));
    let cell = ca * cb;
    let (xa, xb) = (table.codes(a), table.codes(b));
    let mut strata = vec![0usize; n];
    for &c in cond {
        let card = table.card(c);
        for (s, &v) in strata.iter_mut().zip(table.codes(c)) {
            *s = *s * card + v as usize;
        }
    }
    let mut slot: HashMap<usize, usize> = HashMap::new();
    let mut counts: Vec<Vec<u32>> = Vec::new();
    for r in 0..n {
        let next = counts.len();
        let k = *slot.entry(strata[r]).or_insert(next);
        if k == next {
            counts.push(vec![0; cell]);
        }
        counts[k][xa[r] as usize * cb + xb[r] as usize] += 1;
    }
    counts
}

/// G² likelihood-ratio test of `a ⫫ b | cond` on discrete columns.
///
/// Each stratum contributes `(r − 1)(c − 1)` degrees of freedom, where `r`
/// and `c` count the non-empty rows and columns of its table.
pub fn g2_test(
    table: &DiscreteTable,
    a: usize,
    b: usize,
    cond: &[usize],
    alpha: f64,
) -> Result<CiTestResult> {
    if table.n_rows() == 0 {
        return Err(Error::InvalidData("independence test on empty data".into()));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return invalid_arg(format!("alpha {alpha} is outside [0, 1]"));
    }
    let cb = table.card(b);
    let mut g2 = 0.0;
    let mut dof = 0usize;
    for counts in stratified_counts(table, a, b, cond) {
        let ca = counts.len() / cb;
        let row: Vec<u32> = (0..ca).map(|i| counts[i * cb..(i + 1) * cb].iter().sum()).collect();
        let col: Vec<u32> = (0..cb).map(|j| (0..ca).map(|i| counts[i * cb + j]).sum()).collect();
        let total: u32 = row.iter().sum();
        let nr = row.iter().filter(|&&v| v > 0).count();
        let nc = col.iter().filter(|&&v| v > 0).count();
        dof += nr.saturating_sub(1) * nc.saturating_sub(1);
        let t = f64::from(total);
        for i in 0..ca {
            for j in 0..cb {
                let o = counts[i * cb + j];
                if o > 0 {
                    let e = f64::from(row[i]) * f64::from(col[j]) / t;
                    g2 += f64::from(o) * (f64::from(o) / e).ln();
                }
            }
        }
    }
    let g2 = (2.0 * g2).max(0.0);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .expect("positive degrees of freedom")
            .sf(g2)
            .clamp(0.0, 1.0)
    };
    Ok(CiTestResult {
        g2,
        dof,
        p_value,
        independent: p_value > alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    fn table(cols: Vec<(usize, Vec<u32>)>) -> DiscreteTable {
        let names = (0..cols.len()).map(|i| format!("v{i}")).collect();
        let (cards, codes) = cols.into_iter().unzip();
        DiscreteTable::new(names, cards, codes).unwrap()
    }

    fn from_counts(cells: [[u32; 2]; 2]) -> DiscreteTable {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (i, row) in cells.iter().enumerate() {
            for (j, &n) in row.iter().enumerate() {
                for _ in 0..n {
                    a.push(i as u32);
                    b.push(j as u32);
                }
            }
        }
        table(vec![(2, a), (2, b)])
    }

    #[test]
    fn two_by_two_hand_value() {
        let t = from_counts([[30, 10], [10, 30]]);
        let r = g2_test(&t, 0, 1, &[], 0.01).unwrap();
        let hand = 2.0 * (2.0 * 30.0 * (30.0f64 / 20.0).ln() + 2.0 * 10.0 * (10.0f64 / 20.0).ln());
        assert!((r.g2 - hand).abs() < 1e-9);
        assert!((r.g2 - 20.93).abs() < 0.01);
        assert_eq!(r.dof, 1);
        assert!(r.p_value < 0.01 && !r.independent);
    }

    #[test]
    fn constant_column_is_independent() {
        let t = table(vec![(2, vec![0, 1, 0, 1]), (3, vec![2, 2, 2, 2])]);
        let r = g2_test(&t, 0, 1, &[], 0.01).unwrap();
        assert_eq!((r.dof, r.p_value, r.independent), (0, 1.0, true));
    }

    #[test]
    fn copy_is_dependent_under_other_conditioning() {
        let mut rng = crate::rng_from_seed(8);
        let a: Vec<u32> = (0..500).map(|_| rng.random_range(0..3)).collect();
        let c: Vec<u32> = (0..500).map(|_| rng.random_range(0..2)).collect();
        let t = table(vec![(3, a.clone()), (3, a), (2, c)]);
        assert!(!g2_test(&t, 0, 1, &[], 0.01).unwrap().independent);
        assert!(!g2_test(&t, 0, 1, &[2], 0.01).unwrap().independent);
    }

    #[test]
    fn fair_coins_mostly_independent() {
        let mut rng = crate::rng_from_seed(11);
        let reps = 200;
        let mut ok = 0;
        for _ in 0..reps {
            let a: Vec<u32> = (0..10_000).map(|_| rng.random_range(0..2)).collect();
            let b: Vec<u32> = (0..10_000).map(|_| rng.random_range(0..2)).collect();
            let t = table(vec![(2, a), (2, b)]);
            ok += usize::from(g2_test(&t, 0, 1, &[], 0.01).unwrap().independent);
        }
        assert!(ok as f64 / reps as f64 >= 0.98);
    }

    #[test]
    fn empty_data_is_error() {
        let t = table(vec![(2, vec![]), (2, vec![])]);
        assert!(g2_test(&t, 0, 1, &[], 0.01).is_err());
    }

    #[test]
    fn empty_strata_add_no_dof() {
        // Conditioning variable has 3 states but only two occur.
        let t = table(vec![
            (2, vec![0, 1, 0, 1, 0, 1, 0, 1]),
            (2, vec![0, 1, 1, 0, 0, 1, 1, 0]),
            (3, vec![0, 0, 0, 0, 2, 2, 2, 2]),
        ]);
        assert_eq!(g2_test(&t, 0, 1, &[2], 0.01).unwrap().dof, 2);
    }
}
