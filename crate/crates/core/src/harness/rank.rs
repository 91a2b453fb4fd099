use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ranks of the known important variables (or set) over a batch of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankResult {
    /// Per-row rank (mean over important variables for singletons).
    pub ranks: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    /// Share of important items ranked first.
    pub top1: f64,
    /// Share of important items ranked in the first five.
    pub top5: f64,
    pub n_candidates: usize,
    /// Wall-clock time spent explaining the batch; kept out of reports.
    #[serde(skip)]
    pub seconds: f64,
}

/// Competition rank of `scores[i]`: one plus the number of strictly higher
/// scores.
pub fn competition_rank(scores: &[f64], i: usize) -> usize {
    1 + scores.iter().filter(|&&s| s > scores[i]).count()
}

fn summarize(ranks: Vec<f64>, item_ranks: &[usize], n_candidates: usize) -> RankResult {
    let n = ranks.len() as f64;
    let mean = ranks.iter().sum::<f64>() / n;
    let std = if ranks.len() > 1 {
        (ranks.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let share = |k: usize| item_ranks.iter().filter(|&&r| r <= k).count() as f64 / item_ranks.len() as f64;
    RankResult {
        ranks,
        mean,
        std,
        top1: share(1),
        top5: share(5),
        n_candidates,
        seconds: 0.0,
    }
}

fn check_scores(scores: &[Vec<f64>], width: usize, what: &str) -> Result<()> {
    for (r, row) in scores.iter().enumerate() {
        if row.len() != width {
            return Err(Error::InvalidData(format!(
                "row {r}: {} {what} scores for {width} candidates",
                row.len()
            )));
        }
        if row.iter().any(|s| s.is_nan()) {
            return Err(Error::InvalidData(format!("row {r}: missing (NaN) {what} score")));
        }
    }
    Ok(())
}

/// Rank of each important variable among `candidates` by per-row
/// singleton importance; a row's rank is the mean over its important
/// variables.
pub fn rank_single(scores: &[Vec<f64>], candidates: &[String], important: &[Vec<String>]) -> Result<RankResult> {
    if scores.is_empty() || scores.len() != important.len() {
        return Err(Error::DimensionMismatch {
            expected: important.len(),
            got: scores.len(),
        });
    }
    check_scores(scores, candidates.len(), "singleton")?;
    let mut ranks = Vec::with_capacity(scores.len());
    let mut items = Vec::new();
    for (row, imp) in scores.iter().zip(important) {
        if imp.is_empty() {
            return Err(Error::InvalidData("empty important set".into()));
        }
        let mut sum = 0.0;
        for v in imp {
            let i = candidates
                .iter()
                .position(|c| c == v)
                .ok_or_else(|| Error::UnknownVariable(v.clone()))?;
            let r = competition_rank(row, i);
            items.push(r);
            sum += r as f64;
        }
        ranks.push(sum / imp.len() as f64);
    }
    Ok(summarize(ranks, &items, candidates.len()))
}

/// Rank of each row's important set among `subsets` (all of one size).
pub fn rank_combo(scores: &[Vec<f64>], subsets: &[Vec<String>], important: &[Vec<String>]) -> Result<RankResult> {
    if scores.is_empty() || scores.len() != important.len() {
        return Err(Error::DimensionMismatch {
            expected: important.len(),
            got: scores.len(),
        });
    }
    check_scores(scores, subsets.len(), "subset")?;
    let sorted: Vec<Vec<&String>> = subsets
        .iter()
        .map(|s| {
            let mut v: Vec<&String> = s.iter().collect();
            v.sort();
            v
        })
        .collect();
    let mut items = Vec::with_capacity(scores.len());
    for (row, imp) in scores.iter().zip(important) {
        let mut want: Vec<&String> = imp.iter().collect();
        want.sort();
        let i = sorted
            .iter()
            .position(|s| *s == want)
            .ok_or_else(|| Error::InvalidData(format!("important set {imp:?} is not among the ranked subsets")))?;
        items.push(competition_rank(row, i));
    }
    let ranks = items.iter().map(|&r| r as f64).collect();
    Ok(summarize(ranks, &items, subsets.len()))
}
