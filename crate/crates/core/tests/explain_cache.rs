mod common;

use cennet::explain::{candidate_subsets, eep, explain_rows, subsets_up_to, EepCache, ExplainConfig};
use cennet::store::SplitTag;
use rand::{Rng, SeedableRng};

#[test]
fn stored_conditionals_are_distributions() {
    let f = common::fitted(2);
    let mut checked = 0;
    for (i, nc) in f.cache.neurons.iter().enumerate() {
        let total: f64 = (0..nc.n_states as u32).map(|z| f.cache.marginal(i, z).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-9);
        for (vars, t) in &nc.tables {
            let n_cfg = t.config_totals.len();
            for k in 0..n_cfg {
                let mut codes = vec![0u32; f.cache.cards.len()];
                let mut rest = k;
                for &v in vars.iter().rev() {
                    codes[v] = (rest % f.cache.cards[v]) as u32;
                    rest /= f.cache.cards[v];
                }
                let s: f64 = (0..nc.n_states as u32)
                    .map(|z| f.cache.conditional(i, vars, &codes, z).unwrap())
                    .sum();
                assert!((s - 1.0).abs() < 1e-9, "neuron {i} vars {vars:?} config {k}: {s}");
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn cached_eep_matches_recount() {
    let f = common::fitted(2);
    let train = f.ds.rows(SplitTag::Train);
    // Recount from scratch: discretize every input and every neuron directly.
    let codes: Vec<Vec<u32>> = f
        .report
        .inputs
        .iter()
        .map(|n| f.report.discretizer.apply(f.ds.column(n).unwrap()).unwrap())
        .collect();
    let views = f.model.views(&f.ds).unwrap();
    let states: Vec<Vec<u32>> = f
        .report
        .neurons
        .iter()
        .enumerate()
        .map(|(i, nr)| views.iter().map(|v| nr.bins.bin(v.activations[i])).collect())
        .collect();
    let usable: Vec<usize> = (0..f.cache.neurons.len()).filter(|&i| !f.cache.neurons[i].ccv.is_empty()).collect();
    assert!(!usable.is_empty());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let i = usable[rng.random_range(0..usable.len())];
        let subsets = subsets_up_to(&f.cache.neurons[i].ccv, 2);
        let vars = &subsets[rng.random_range(0..subsets.len())];
        let r = train[rng.random_range(0..train.len())];
        let row_codes: Vec<u32> = codes.iter().map(|c| c[r]).collect();
        let z = states[i][r];
        let k = f.report.neurons[i].bins.n_bins() as f64;
        let matches = |q: usize| vars.iter().all(|&v| codes[v][q] == row_codes[v]);
        let n_x = train.iter().filter(|&&q| matches(q)).count() as f64;
        let n_zx = train.iter().filter(|&&q| matches(q) && states[i][q] == z).count() as f64;
        let n_z = train.iter().filter(|&&q| states[i][q] == z).count() as f64;
        let expected = ((n_zx + 1.0) / (n_x + k)).ln() - ((n_z + 1.0) / (train.len() as f64 + k)).ln();
        let got = eep(&f.cache, i, z, vars, &row_codes).unwrap();
        assert!((got - expected).abs() < 1e-12, "neuron {i} vars {vars:?} row {r}: {got} vs {expected}");
    }
}

#[test]
fn unseen_configuration_without_smoothing_is_an_error() {
    let f = common::fitted(1);
    let cfg = ExplainConfig {
        smoothing: 0.0,
        ..f.cfg
    };
    let cache = EepCache::build(&f.model, &f.report, &f.ds, &cfg).unwrap();
    let i = (0..cache.neurons.len()).find(|&i| !cache.neurons[i].ccv.is_empty()).unwrap();
    let v = cache.neurons[i].ccv[0];
    let mut t = cache.table(i, &[v]).unwrap().clone();
    t.config_totals.iter_mut().for_each(|c| *c = 0);
    t.counts.iter_mut().for_each(|c| *c = 0);
    let mut broken = cache.clone();
    broken.neurons[i].tables.insert(vec![v], t);
    let codes = vec![0u32; cache.cards.len()];
    assert!(matches!(
        eep(&broken, i, 0, &[v], &codes),
        Err(cennet::Error::UndefinedProbability(_))
    ));
}

#[test]
fn configuration_counts_follow_subset_sizes() {
    let items: Vec<usize> = (0..10).collect();
    assert_eq!(subsets_up_to(&items[..4], 1).len(), 4);
    assert_eq!(subsets_up_to(&items, 2).len(), 55);
    assert_eq!(subsets_up_to(&items, 3).len(), 10 + 45 + 120);

    let f = common::fitted(2);
    let union = f.report.ccv_union().len();
    let subsets = candidate_subsets(&f.report, &f.cache, &f.cfg).unwrap();
    assert_eq!(subsets.len(), union + union * (union - 1) / 2);
    let rows: Vec<usize> = f.ds.rows(SplitTag::Test).into_iter().take(5).collect();
    for list in explain_rows(&f.model, &f.report, &f.cache, &f.ds, &rows, &f.cfg).unwrap() {
        assert_eq!(list.explanations.len(), subsets.len());
        assert!(list.explanations.windows(2).all(|w| w[0].tep >= w[1].tep));
        for e in &list.explanations {
            assert_eq!(e.tep, e.pep + e.nep);
            assert!(e.size() <= f.cfg.m);
            for c in &e.contributions {
                if c.eep <= 0.0 {
                    assert_eq!(c.contribution, 0.0);
                }
            }
        }
    }
}

#[test]
fn ranking_ignores_output_bias() {
    let f = common::fitted(2);
    let rows: Vec<usize> = f.ds.rows(SplitTag::Test).into_iter().take(10).collect();
    let a = explain_rows(&f.model, &f.report, &f.cache, &f.ds, &rows, &f.cfg).unwrap();
    let mut shifted = f.model.clone();
    let last = shifted.layers.last_mut().unwrap();
    last.bias[0] += 3.5;
    let b = explain_rows(&shifted, &f.report, &f.cache, &f.ds, &rows, &f.cfg).unwrap();
    for (la, lb) in a.iter().zip(&b) {
        let ka: Vec<_> = la.explanations.iter().map(|e| &e.config).collect();
        let kb: Vec<_> = lb.explanations.iter().map(|e| &e.config).collect();
        assert_eq!(ka, kb);
        for (ea, eb) in la.explanations.iter().zip(&lb.explanations) {
            assert!((eb.tep - ea.tep - 7.0).abs() < 1e-9);
        }
    }
}

#[test]
fn explanations_are_deterministic_across_thread_counts() {
    let f = common::fitted(2);
    let rows: Vec<usize> = f.ds.rows(SplitTag::Test);
    let run = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| explain_rows(&f.model, &f.report, &f.cache, &f.ds, &rows, &f.cfg).unwrap())
    };
    let (a, b) = (run(1), run(3));
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
