use std::collections::BTreeMap;

use serde::Serialize;

use super::alg::SplitRun;
use super::config::AnalysisConfig;
use super::select::Selection;
use crate::regress::Mode;
use crate::tabular::Dataset;

/// Result of the multisplit procedure. Variables are reported by name; the
/// index form of the selected set is kept for programmatic use.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WellSpecReport {
    pub p0: f64,
    pub alpha: f64,
    pub alpha_tilde: f64,
    #[serde(rename = "B")]
    pub splits: usize,
    pub mode: Mode,
    pub target: String,
    pub variables: Vec<String>,
    pub counts: Vec<usize>,
    pub n_bar: f64,
    pub n_min: usize,
    pub proportion_pvalues: BTreeMap<String, f64>,
    pub w_hat: Vec<String>,
    #[serde(skip)]
    pub w_hat_idx: Vec<usize>,
    pub per_split_pvalues: Vec<f64>,
    pub fallback_rows: usize,
    pub config: AnalysisConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub splits_detail: Option<Vec<SplitRun>>,
}

impl WellSpecReport {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        ds: &Dataset,
        cfg: &AnalysisConfig,
        counts: Vec<usize>,
        per_split_pvalues: Vec<f64>,
        p0: f64,
        sel: Selection,
        runs: Vec<SplitRun>,
        keep_splits: bool,
    ) -> Self {
        let names = ds.names();
        let proportion_pvalues = sel
            .proportion_pvalues
            .iter()
            .enumerate()
            .filter_map(|(j, p)| p.map(|p| (names[j].clone(), p)))
            .collect();
        Self {
            p0,
            alpha: cfg.alpha,
            alpha_tilde: cfg.alpha_tilde,
            splits: cfg.splits,
            mode: cfg.mode,
            target: ds.target_name().to_string(),
            variables: names.to_vec(),
            counts,
            n_bar: sel.n_bar,
            n_min: sel.n_min,
            proportion_pvalues,
            w_hat: sel.w_hat.iter().map(|&j| names[j].clone()).collect(),
            w_hat_idx: sel.w_hat,
            per_split_pvalues,
            fallback_rows: runs.iter().map(|r| r.fallback_count).sum(),
            config: cfg.clone(),
            splits_detail: keep_splits.then_some(runs),
        }
    }

    pub fn contains(&self, j: usize) -> bool {
        self.w_hat_idx.contains(&j)
    }
}
