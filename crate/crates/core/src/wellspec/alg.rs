use ndarray::ArrayView2;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use super::config::AnalysisConfig;
use super::report::WellSpecReport;
use super::select::select_well_specified;
use crate::error::{Error, Result};
use crate::indtest::{aggregate_pvalues, hsic_test, HsicResult};
use crate::rankdep::{foci_select_with, transform_g, FociOptions, FociResult};
use crate::regress::{fit, fit_moments, residualize_anm, residualize_lsnm, FitInfo, Mode, Residuals};
use crate::tabular::{make_split, Dataset, RngStream, SplitPlan};

/// Smallest sample accepted by the in-sample and multisplit procedures.
pub const MIN_ROWS: usize = 8;

/// Diagnostics of one oriented split.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitRun {
    pub b: u64,
    pub swapped: bool,
    pub p_b: f64,
    pub hsic_statistic: f64,
    /// FOCI selection on the evaluation half, in selection order.
    pub s_hat: Vec<usize>,
    pub foci_undefined: bool,
    pub fallback_count: usize,
    pub fit: FitInfo,
}

/// Residuals of a model fitted on `fit_idx` (early stopping on `eval_idx`)
/// and evaluated on `eval_idx`.
pub fn heldout_residuals(
    ds: &Dataset,
    cfg: &AnalysisConfig,
    fit_idx: &[usize],
    eval_idx: &[usize],
) -> Result<(Residuals, FitInfo)> {
    let (xf, yf) = ds.rows(fit_idx);
    let (xe, ye) = ds.rows(eval_idx);
    residuals_on(cfg, xf.view(), &yf, xe.view(), &ye, xe.view(), &ye)
}

fn residuals_on(
    cfg: &AnalysisConfig,
    x_fit: ArrayView2<'_, f64>,
    y_fit: &[f64],
    x_stop: ArrayView2<'_, f64>,
    y_stop: &[f64],
    x_eval: ArrayView2<'_, f64>,
    y_eval: &[f64],
) -> Result<(Residuals, FitInfo)> {
    match cfg.mode {
        Mode::Anm => {
            let m = fit(&cfg.regressor, x_fit, y_fit, x_stop, y_stop)?;
            Ok((residualize_anm(&m, x_eval, y_eval)?, m.info()))
        }
        Mode::Lsnm => {
            let (f1, f2) = fit_moments(&cfg.regressor, x_fit, y_fit, x_stop, y_stop)?;
            Ok((residualize_lsnm(&f1, &f2, x_eval, y_eval, cfg.big)?, f1.info()))
        }
    }
}

fn foci_on(cfg: &AnalysisConfig, eps: &[f64], x: ArrayView2<'_, f64>, rng: &RngStream) -> Result<FociResult> {
    let opts = FociOptions {
        standardize: cfg.standardize_foci,
        ..Default::default()
    };
    foci_select_with(&transform_g(eps, cfg.g), x, rng, &opts)
}

/// In-sample FOCI: fit on all rows except a 10% early-stopping holdout,
/// residualise every row, then select predictors of `g(ε̂)`.
pub fn alg1_insample(ds: &Dataset, cfg: &AnalysisConfig, rng: &RngStream) -> Result<FociResult> {
    cfg.validate()?;
    ds.require_rows(MIN_ROWS)?;
    let n = ds.n();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng.child(0).rng());
    let (hold, train) = idx.split_at((n / 10).max(1));
    let (xt, yt) = ds.rows(train);
    let (xh, yh) = ds.rows(hold);
    let (res, _) = residuals_on(cfg, xt.view(), &yt, xh.view(), &yh, ds.x(), ds.y())?;
    foci_on(cfg, &res.eps_hat, ds.x(), &rng.child(1))
}

/// Sample-splitting FOCI on one orientation of `plan`: fit on one half,
/// then test and select on the residuals of the other.
pub fn alg2_split(ds: &Dataset, cfg: &AnalysisConfig, plan: &SplitPlan, swapped: bool) -> Result<SplitRun> {
    if plan.n() != ds.n() {
        return Err(Error::ShapeMismatch(format!(
            "split over {} rows, data has {}",
            plan.n(),
            ds.n()
        )));
    }
    let (fit_idx, eval_idx) = plan.halves(swapped);
    if fit_idx.len() < 4 || eval_idx.len() < 4 {
        return Err(Error::TooFewRows {
            n: plan.n(),
            min: MIN_ROWS,
        });
    }
    let (res, info) = heldout_residuals(ds, cfg, fit_idx, eval_idx)?;
    let (xe, _) = ds.rows(eval_idx);
    let master = RngStream::new(cfg.master_seed);
    let o = u64::from(swapped);
    let HsicResult { statistic, p_value, .. } = hsic_test(
        &res.eps_hat,
        xe.view(),
        cfg.hsic,
        cfg.n_permutations,
        &master.descend(&[3, plan.b, o]),
    )?;
    let foci = foci_on(cfg, &res.eps_hat, xe.view(), &master.descend(&[4, plan.b, o]))?;
    Ok(SplitRun {
        b: plan.b,
        swapped,
        p_b: p_value,
        hsic_statistic: statistic,
        s_hat: foci.selected,
        foci_undefined: foci.undefined,
        fallback_count: res.fallback_count,
        fit: info,
    })
}

/// All `2B` oriented split runs, ordered by (b, orientation).
pub fn split_runs(ds: &Dataset, cfg: &AnalysisConfig) -> Result<Vec<SplitRun>> {
    cfg.validate()?;
    ds.require_rows(MIN_ROWS)?;
    let b_count = cfg.splits;
    let plans = (0..b_count as u64)
        .map(|b| make_split(ds.n(), cfg.master_seed, b))
        .collect::<Result<Vec<_>>>()?;
    let mut runs = (0..2 * b_count)
        .into_par_iter()
        .map(|r| alg2_split(ds, cfg, &plans[r % b_count], r >= b_count))
        .collect::<Result<Vec<_>>>()?;
    runs.sort_by_key(|r| (r.b, r.swapped));
    Ok(runs)
}

/// The full multisplit selection procedure.
pub fn alg3_multisplit(ds: &Dataset, cfg: &AnalysisConfig, keep_splits: bool) -> Result<WellSpecReport> {
    let runs = split_runs(ds, cfg)?;
    summarize(ds, cfg, runs, keep_splits)
}

/// Aggregate finished split runs into a report.
pub fn summarize(ds: &Dataset, cfg: &AnalysisConfig, runs: Vec<SplitRun>, keep_splits: bool) -> Result<WellSpecReport> {
    let p = ds.p();
    let two_b = runs.len();
    let mut counts = vec![0usize; p];
    for run in &runs {
        for &j in &run.s_hat {
            counts[j] += 1;
        }
    }
    let pvals: Vec<f64> = runs.iter().map(|r| r.p_b).collect();
    let agg = aggregate_pvalues(&pvals, cfg.gamma_min)?;
    let sel = select_well_specified(&counts, two_b, agg.p0, cfg.alpha, cfg.alpha_tilde)?;
    Ok(WellSpecReport::new(
        ds,
        cfg,
        counts,
        pvals,
        agg.p0,
        sel,
        runs,
        keep_splits,
    ))
}
