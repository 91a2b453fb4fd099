use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::GroundTruth;
use crate::error::{invalid_arg, Result};
use crate::store::{Column, TabularDataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticKind {
    NonlinearAdditive,
    NonlinearNonadditive,
    Category,
}

impl SyntheticKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "nonlinear-additive" => Ok(SyntheticKind::NonlinearAdditive),
            "nonlinear-nonadditive" => Ok(SyntheticKind::NonlinearNonadditive),
            "category" => Ok(SyntheticKind::Category),
            other => invalid_arg(format!(
                "unknown kind `{other}` (nonlinear-additive|nonlinear-nonadditive|category)"
            )),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SyntheticKind::NonlinearAdditive => "nonlinear-additive",
            SyntheticKind::NonlinearNonadditive => "nonlinear-nonadditive",
            SyntheticKind::Category => "category",
        }
    }

    fn min_features(&self) -> usize {
        match self {
            SyntheticKind::NonlinearAdditive => 4,
            SyntheticKind::NonlinearNonadditive => 7,
            SyntheticKind::Category => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub n_samples: usize,
    pub seed: u64,
    #[serde(default = "default_features")]
    pub n_features: usize,
}

fn default_features() -> usize {
    10
}

impl SyntheticSpec {
    pub fn new(kind: SyntheticKind, n_samples: usize, seed: u64) -> Self {
        SyntheticSpec {
            kind,
            n_samples,
            seed,
            n_features: default_features(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub dataset: TabularDataset,
    pub ground_truth: GroundTruth,
    /// Median of the additive score, subtracted before the logistic link.
    pub centering: Option<f64>,
}

/// P(Y=1 | X1, X2, X3) for the category benchmark, indexed `[x1][x2][x3]`.
pub const CATEGORY_TABLE: [[[f64; 2]; 2]; 2] = [[[0.80, 0.25], [0.70, 0.20]], [[0.20, 0.85], [0.80, 0.20]]];

pub fn category_probability(x1: u32, x2: u32, x3: u32) -> f64 {
    CATEGORY_TABLE[x1 as usize][x2 as usize][x3 as usize]
}

/// `sin(0.2 x1) + 0.1 |x2| + x3 + exp(-x4)`.
pub fn additive_score(x: &[f64]) -> f64 {
    (0.2 * x[0]).sin() + 0.1 * x[1].abs() + x[2] + (-x[3]).exp()
}

/// Branch logit and the 0-based index of the partner variable selected by x1.
pub fn nonadditive_logit(x: &[f64]) -> (f64, usize) {
    let x1 = x[0];
    if x1 > 7.0 {
        (x[1].sin(), 1)
    } else if x1 > 4.0 {
        (x[2].cos(), 2)
    } else if x1 > 0.0 {
        (x[3].tan(), 3)
    } else if x1 > -4.0 {
        ((2.0 * x[4]).exp(), 4)
    } else if x1 > -7.0 {
        (x[5].tanh(), 5)
    } else {
        (x[6].sin(), 6)
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn var_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("X{i}")).collect()
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Generates one of the synthetic benchmarks; deterministic in `spec.seed`.
pub fn generate(spec: &SyntheticSpec) -> Result<Generated> {
    if spec.n_samples == 0 {
        return invalid_arg("n_samples must be at least 1");
    }
    if spec.n_features < spec.kind.min_features() {
        return invalid_arg(format!(
            "{} needs at least {} features",
            spec.kind.as_str(),
            spec.kind.min_features()
        ));
    }
    match spec.kind {
        SyntheticKind::NonlinearAdditive => nonlinear_additive(spec),
        SyntheticKind::NonlinearNonadditive => nonlinear_nonadditive(spec),
        SyntheticKind::Category => category(spec),
    }
}

fn gaussian_rows(spec: &SyntheticSpec, first_uniform: bool, rng: &mut crate::Rng) -> Vec<Vec<f64>> {
    (0..spec.n_samples)
        .map(|_| {
            (0..spec.n_features)
                .map(|j| {
                    if j == 0 && first_uniform {
                        rng.random_range(-10.0..10.0)
                    } else {
                        StandardNormal.sample(rng)
                    }
                })
                .collect()
        })
        .collect()
}

fn numeric_columns(rows: &[Vec<f64>], names: &[String]) -> Vec<Column> {
    names
        .iter()
        .enumerate()
        .map(|(j, n)| Column::numeric(n, rows.iter().map(|r| r[j]).collect()))
        .collect()
}

fn nonlinear_additive(spec: &SyntheticSpec) -> Result<Generated> {
    let mut rng = crate::rng_from_seed(spec.seed);
    let rows = gaussian_rows(spec, false, &mut rng);
    let scores: Vec<f64> = rows.iter().map(|r| additive_score(r)).collect();
    let c = median(&scores);
    let y: Vec<u32> = scores
        .iter()
        .map(|&f| u32::from(rng.random::<f64>() < sigmoid(f - c)))
        .collect();
    let names = var_names(spec.n_features);
    let mut cols = numeric_columns(&rows, &names);
    cols.push(Column::binary("Y", y));
    Ok(Generated {
        dataset: TabularDataset::new(cols, "Y", "1")?,
        ground_truth: GroundTruth {
            important_sets: names[..4].iter().map(|n| vec![n.clone()]).collect(),
            per_row: None,
            candidate_vars: names,
            parents_of_target: Vec::new(),
        },
        centering: Some(c),
    })
}

fn nonlinear_nonadditive(spec: &SyntheticSpec) -> Result<Generated> {
    let mut rng = crate::rng_from_seed(spec.seed);
    let rows = gaussian_rows(spec, true, &mut rng);
    let names = var_names(spec.n_features);
    let mut y = Vec::with_capacity(rows.len());
    let mut per_row = Vec::with_capacity(rows.len());
    for r in &rows {
        let (g, partner) = nonadditive_logit(r);
        y.push(u32::from(rng.random::<f64>() < sigmoid(g)));
        per_row.push(vec![names[0].clone(), names[partner].clone()]);
    }
    let mut cols = numeric_columns(&rows, &names);
    cols.push(Column::binary("Y", y));
    let important_sets = (1..7)
        .map(|p| vec![names[0].clone(), names[p].clone()])
        .collect();
    Ok(Generated {
        dataset: TabularDataset::new(cols, "Y", "1")?,
        ground_truth: GroundTruth {
            important_sets,
            per_row: Some(per_row),
            candidate_vars: names,
            parents_of_target: Vec::new(),
        },
        centering: None,
    })
}

fn category(spec: &SyntheticSpec) -> Result<Generated> {
    let mut rng = crate::rng_from_seed(spec.seed);
    let n = spec.n_samples;
    let mut bits = vec![Vec::with_capacity(n); spec.n_features];
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        for col in bits.iter_mut() {
            col.push(u32::from(rng.random::<bool>()));
        }
        let last = bits[0].len() - 1;
        let p = category_probability(bits[0][last], bits[1][last], bits[2][last]);
        y.push(u32::from(rng.random::<f64>() < p));
    }
    let names = var_names(spec.n_features);
    let mut cols: Vec<Column> = names
        .iter()
        .zip(bits)
        .map(|(n, b)| Column::binary(n, b))
        .collect();
    cols.push(Column::binary("Y", y));
    Ok(Generated {
        dataset: TabularDataset::new(cols, "Y", "1")?,
        ground_truth: GroundTruth {
            important_sets: vec![names[..3].to_vec()],
            per_row: None,
            candidate_vars: names,
            parents_of_target: Vec::new(),
        },
        centering: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::ColumnData;

    #[test]
    fn additive_score_at_origin() {
        assert_eq!(additive_score(&[0.0; 10]), 1.0);
    }

    #[test]
    fn additive_ground_truth() {
        let g = generate(&SyntheticSpec::new(SyntheticKind::NonlinearAdditive, 50, 42)).unwrap();
        assert_eq!(
            g.ground_truth.important_for_row(0),
            vec!["X1", "X2", "X3", "X4"]
        );
        assert!(g.centering.is_some());
    }

    #[test]
    fn nonadditive_partners() {
        let mut x = [0.0; 10];
        x[0] = 8.3;
        assert_eq!(nonadditive_logit(&x).1, 1);
        x[0] = -9.0;
        assert_eq!(nonadditive_logit(&x).1, 6);
        x[0] = 5.0;
        assert_eq!(nonadditive_logit(&x).1, 2);
        x[0] = 0.5;
        assert_eq!(nonadditive_logit(&x).1, 3);
        x[0] = -1.0;
        assert_eq!(nonadditive_logit(&x).1, 4);
        x[0] = -5.0;
        assert_eq!(nonadditive_logit(&x).1, 5);
    }

    #[test]
    fn nonadditive_per_row_pairs_follow_x1() {
        let g = generate(&SyntheticSpec::new(SyntheticKind::NonlinearNonadditive, 200, 1)).unwrap();
        let ColumnData::Numeric(x1) = &g.dataset.column("X1").unwrap().data else {
            panic!()
        };
        for (r, &v) in x1.iter().enumerate() {
            assert!((-10.0..10.0).contains(&v));
            let pair = g.ground_truth.important_for_row(r);
            assert_eq!(pair[0], "X1");
            if v > 7.0 {
                assert_eq!(pair[1], "X2");
            } else if v <= -7.0 {
                assert_eq!(pair[1], "X7");
            }
        }
    }

    #[test]
    fn category_table_values() {
        assert_eq!(category_probability(1, 0, 1), 0.85);
        assert_eq!(category_probability(1, 1, 1), 0.20);
        assert_eq!(category_probability(0, 0, 0), 0.80);
        let mean: f64 = CATEGORY_TABLE.iter().flatten().flatten().sum::<f64>() / 8.0;
        assert!((mean - 0.5).abs() < 1e-12);
    }

    #[test]
    fn invalid_sizes() {
        assert!(generate(&SyntheticSpec::new(SyntheticKind::Category, 0, 1)).is_err());
        let mut s = SyntheticSpec::new(SyntheticKind::NonlinearNonadditive, 10, 1);
        s.n_features = 5;
        assert!(generate(&s).is_err());
    }

    #[test]
    fn deterministic() {
        let s = SyntheticSpec::new(SyntheticKind::NonlinearNonadditive, 100, 42);
        assert_eq!(generate(&s).unwrap().dataset, generate(&s).unwrap().dataset);
    }
}
