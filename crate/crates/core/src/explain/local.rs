use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{emi, subsets_up_to, tep_score, ConfigItem, EepCache, ExplainConfig, Explanation, RowContext};
use crate::causal::CausalReport;
use crate::error::Result;
use crate::mlp::{sigmoid, MlpModel};
use crate::store::{ColumnBins, TabularDataset};

/// Ranked explanations for one row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationList {
    pub row: usize,
    pub logit: f64,
    pub probability: f64,
    pub explanations: Vec<Explanation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// Human-readable label of state `code` of input `var`.
pub fn value_label(report: &CausalReport, var: usize, code: u32) -> String {
    match report.discretizer.get(&report.inputs[var]) {
        Ok(ColumnBins::Categorical { levels }) => levels[code as usize].clone(),
        Ok(ColumnBins::Numeric(b)) => {
            let k = code as usize;
            let lo = if k == 0 { f64::NEG_INFINITY } else { b.edges[k - 1] };
            let hi = b.edges.get(k).copied().unwrap_or(f64::INFINITY);
            format!("({lo}, {hi}]")
        }
        Err(_) => code.to_string(),
    }
}

/// Input subsets to score for every row: all subsets of the CCV union up
/// to size `m`, or, with an EMI screen, the union over neurons of each
/// neuron's top-K CCV subsets by EMI.
pub fn candidate_subsets(report: &CausalReport, cache: &EepCache, cfg: &ExplainConfig) -> Result<Vec<Vec<usize>>> {
    let union: Vec<usize> = report
        .ccv_union()
        .iter()
        .map(|v| report.inputs.iter().position(|x| x == v).expect("input"))
        .collect();
    let Some(k) = cfg.emi_topk else {
        return Ok(subsets_up_to(&union, cfg.m));
    };
    let mut keep: Vec<Vec<usize>> = Vec::new();
    for (i, nc) in cache.neurons.iter().enumerate() {
        let mut scored: Vec<(Vec<usize>, f64)> = subsets_up_to(&nc.ccv, cfg.m)
            .into_iter()
            .map(|s| {
                let e = emi(cache, i, &s)?;
                Ok((s, e))
            })
            .collect::<Result<_>>()?;
        scored.sort_by(|a, b| b.1.total_cmp(&a.1));
        keep.extend(scored.into_iter().take(k).map(|(s, _)| s));
    }
    keep.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    keep.dedup();
    Ok(keep)
}

fn order(a: &Explanation, b: &Explanation) -> Ordering {
    b.tep
        .total_cmp(&a.tep)
        .then(a.size().cmp(&b.size()))
        .then_with(|| a.variables().cmp(&b.variables()))
        .then_with(|| {
            let va: Vec<&str> = a.config.iter().map(|c| c.value.as_str()).collect();
            let vb: Vec<&str> = b.config.iter().map(|c| c.value.as_str()).collect();
            va.cmp(&vb)
        })
}

/// Scores the row's configuration over `vars` and labels it.
pub fn explanation_for(report: &CausalReport, cache: &EepCache, ctx: &RowContext, vars: &[usize]) -> Result<Explanation> {
    let parts = tep_score(cache, ctx, vars)?;
    Ok(Explanation {
        config: vars
            .iter()
            .map(|&v| ConfigItem {
                variable: report.inputs[v].clone(),
                value: value_label(report, v, ctx.codes[v]),
            })
            .collect(),
        pep: parts.pep,
        nep: parts.nep,
        tep: parts.tep(),
        contributions: parts.contributions,
    })
}

/// Scores every candidate configuration of one row and sorts by TEP
/// (descending), then smaller configurations, then variable names.
pub fn local_explain(
    report: &CausalReport,
    cache: &EepCache,
    ctx: &RowContext,
    subsets: &[Vec<usize>],
) -> Result<ExplanationList> {
    let diagnostic = subsets
        .is_empty()
        .then(|| "no neuron has characteristic correlated variables; nothing to explain".to_string());
    let mut explanations = subsets
        .iter()
        .map(|s| explanation_for(report, cache, ctx, s))
        .collect::<Result<Vec<_>>>()?;
    explanations.sort_by(order);
    Ok(ExplanationList {
        row: ctx.row,
        logit: ctx.view.logit,
        probability: sigmoid(ctx.view.logit),
        explanations,
        diagnostic,
    })
}

/// Explains `rows` of `ds` in parallel; output follows the order of `rows`.
pub fn explain_rows(
    model: &MlpModel,
    report: &CausalReport,
    cache: &EepCache,
    ds: &TabularDataset,
    rows: &[usize],
    cfg: &ExplainConfig,
) -> Result<Vec<ExplanationList>> {
    cfg.validate()?;
    let subsets = candidate_subsets(report, cache, cfg)?;
    let ctx = EepCache::contexts(model, report, ds, rows)?;
    ctx.par_iter()
        .map(|c| local_explain(report, cache, c, &subsets))
        .collect()
}
