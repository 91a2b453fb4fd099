use cennet::causal::{d_separated, g2_test, min_cond_entropy, valid_conditioning_sets, JointTable};
use cennet::datagen::{builtin_network, random_network, RandomNetSpec};
use cennet::store::DiscreteTable;
use proptest::prelude::*;

fn net(seed: u64, n_nodes: usize) -> cennet::datagen::BayesNet {
    random_network(&RandomNetSpec {
        n_nodes,
        max_states: 3,
        max_parents: 3,
        edge_prob: 0.6,
        seed,
    })
    .unwrap()
}

/// `I(a; b | cond)` from entropies of the exact joint.
fn cmi(j: &JointTable, a: usize, b: usize, cond: &[usize]) -> f64 {
    let with = |extra: &[usize]| {
        let mut v = cond.to_vec();
        v.extend_from_slice(extra);
        j.entropy(&v)
    };
    with(&[a]) + with(&[b]) - with(&[a, b]) - j.entropy(cond)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn parents_minimize_conditional_entropy(seed in 0u64..10_000, n in 2usize..=6) {
        let bn = net(seed, n);
        let j = JointTable::from_bn(&bn).unwrap();
        for x in 0..n {
            let allowed = valid_conditioning_sets(bn.dag(), x);
            let (_, min) = min_cond_entropy(&j, x, &allowed).unwrap();
            let pa = j.cond_entropy(x, bn.dag().parents_of(x));
            prop_assert!((min - pa).abs() < 1e-9, "node {x}: min {min} vs parents {pa}");
        }
    }

    #[test]
    fn conditioning_never_raises_entropy(seed in 0u64..10_000, mask_s in 0u32..64, mask_t in 0u32..64) {
        let bn = net(seed, 6);
        let j = JointTable::from_bn(&bn).unwrap();
        let x = 5;
        let pick = |m: u32| (0..5).filter(|i| m >> i & 1 == 1).collect::<Vec<usize>>();
        let s = pick(mask_s);
        let mut st = s.clone();
        st.extend(pick(mask_t).into_iter().filter(|v| !s.contains(v)));
        st.sort_unstable();
        prop_assert!(j.cond_entropy(x, &st) <= j.cond_entropy(x, &s) + 1e-12);
    }

    #[test]
    fn d_separation_implies_exact_independence(seed in 0u64..10_000, mask in 0u32..16) {
        let bn = net(seed, 6);
        let j = JointTable::from_bn(&bn).unwrap();
        let cond: Vec<usize> = (1..5).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        if d_separated(bn.dag(), 0, 5, &cond).unwrap() {
            prop_assert!(cmi(&j, 0, 5, &cond).abs() < 1e-9);
        }
    }

    #[test]
    fn g2_statistic_is_well_formed(
        a in proptest::collection::vec(0u32..3, 60),
        b in proptest::collection::vec(0u32..2, 60),
        c in proptest::collection::vec(0u32..2, 60),
    ) {
        let t = DiscreteTable::new(vec!["a".into(), "b".into(), "c".into()], vec![3, 2, 2], vec![a, b, c]).unwrap();
        for cond in [&[][..], &[2][..]] {
            let r = g2_test(&t, 0, 1, cond, 0.01).unwrap();
            prop_assert!(r.g2 >= -1e-12);
            prop_assert!((0.0..=1.0).contains(&r.p_value));
            prop_assert_eq!(r.independent, r.p_value > 0.01);
        }
    }
}

#[test]
fn alarm_history_depends_on_lvfailure() {
    let bn = builtin_network("alarm").unwrap();
    let lv = bn.index_of("LVFAILURE").unwrap();
    let hi = bn.index_of("HISTORY").unwrap();
    assert!(!d_separated(bn.dag(), lv, hi, &[]).unwrap());
}
