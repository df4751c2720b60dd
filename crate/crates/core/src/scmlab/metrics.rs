use serde::Serialize;

use super::truth::GroundTruth;
use crate::error::{Error, Result};
use crate::regress::FittedModel;
use crate::tabular::Dataset;
use crate::wellspec::WellSpecReport;

/// Average misposition: `(1/n²) Σ_i |#{l: ε_l < ε_i} − #{l: ε̂_l < ε̂_i}|`.
pub fn amp(eps_true: &[f64], eps_hat: &[f64]) -> Result<f64> {
    if eps_true.len() != eps_hat.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} vs {} residuals",
            eps_true.len(),
            eps_hat.len()
        )));
    }
    let n = eps_true.len();
    if n == 0 {
        return Err(Error::TooFewRows { n: 0, min: 1 });
    }
    let below = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        v.iter()
            .map(|x| s.partition_point(|t| t < x) as i64)
            .collect::<Vec<_>>()
    };
    let (a, b) = (below(eps_true), below(eps_hat));
    let total: i64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
    Ok(total as f64 / (n as f64 * n as f64))
}

/// `|mean_{D_I}(y − f̂(x))| / |mean_{D_O}(y)|`.
pub fn relative_bias(model: &FittedModel, d_interv: &Dataset, d_obs: &Dataset) -> Result<f64> {
    if d_interv.names() != d_obs.names() {
        return Err(Error::ShapeMismatch("datasets have different predictors".into()));
    }
    let m_obs = d_obs.y().iter().sum::<f64>() / d_obs.n() as f64;
    if m_obs == 0.0 || !m_obs.is_finite() {
        return Err(Error::InvalidArgument(
            "observational mean is zero; relative bias undefined".into(),
        ));
    }
    let pred = model.predict(d_interv.x())?;
    let err = d_interv.y().iter().zip(&pred).map(|(y, p)| y - p).sum::<f64>() / d_interv.n() as f64;
    Ok(err.abs() / m_obs.abs())
}

/// Empirical selection rates with their denominators; a rate is `None` when
/// its class is empty.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rates {
    pub fpr: Option<f64>,
    pub tpr: Option<f64>,
    pub negatives: usize,
    pub positives: usize,
}

/// Rates over all (run, variable) pairs from selected index sets.
pub fn fpr_tpr_sets(runs: &[(Vec<usize>, GroundTruth)]) -> Result<Rates> {
    if runs.is_empty() {
        return Err(Error::InvalidArgument("no runs to score".into()));
    }
    let (mut fp, mut neg, mut tp, mut pos) = (0usize, 0usize, 0usize, 0usize);
    for (w_hat, truth) in runs {
        for j in 0..truth.n_observed {
            let sel = w_hat.contains(&j);
            if truth.w_true.contains(&j) {
                pos += 1;
                tp += usize::from(sel);
            } else {
                neg += 1;
                fp += usize::from(sel);
            }
        }
    }
    let rate = |a: usize, b: usize| (b > 0).then(|| a as f64 / b as f64);
    Ok(Rates {
        fpr: rate(fp, neg),
        tpr: rate(tp, pos),
        negatives: neg,
        positives: pos,
    })
}

pub fn fpr_tpr(reports: &[(&WellSpecReport, &GroundTruth)]) -> Result<Rates> {
    let sets: Vec<(Vec<usize>, GroundTruth)> = reports
        .iter()
        .map(|(r, t)| (r.w_hat_idx.clone(), (*t).clone()))
        .collect();
    fpr_tpr_sets(&sets)
}
