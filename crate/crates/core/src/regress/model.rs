use ndarray::ArrayView2;
use rayon::prelude::*;
use serde::Serialize;

use super::gbdt::{BoostTrace, BoostedModel};
use super::knn::KnnModel;
use super::spec::RegressorSpec;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Inner {
    Boosted(BoostedModel),
    Knn(KnnModel),
    Constant(f64),
}

/// Fitted conditional-mean model. Prediction is a pure function of its state.
#[derive(Clone, Debug, PartialEq)]
pub struct FittedModel {
    inner: Inner,
    n_features: usize,
}

/// Training metadata carried into reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitInfo {
    pub kind: &'static str,
    pub rounds_used: Option<usize>,
    pub best_valid_mse: Option<f64>,
}

fn check_xy(x: ArrayView2<'_, f64>, y: &[f64], what: &str) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{what}: {} rows, {} targets",
            x.nrows(),
            y.len()
        )));
    }
    if let Some(i) = x.iter().chain(y).position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok(())
}

pub fn fit(
    spec: &RegressorSpec,
    x_train: ArrayView2<'_, f64>,
    y_train: &[f64],
    x_valid: ArrayView2<'_, f64>,
    y_valid: &[f64],
) -> Result<FittedModel> {
    spec.validate()?;
    check_xy(x_train, y_train, "training set")?;
    check_xy(x_valid, y_valid, "validation set")?;
    if x_valid.ncols() != x_train.ncols() && !y_valid.is_empty() {
        return Err(Error::ShapeMismatch(format!(
            "{} training features, {} validation features",
            x_train.ncols(),
            x_valid.ncols()
        )));
    }
    let min = spec.min_train_rows().max(1);
    if y_train.len() < min {
        return Err(Error::TooFewRows { n: y_train.len(), min });
    }
    let inner = match spec {
        RegressorSpec::BoostedTrees(p) => Inner::Boosted(BoostedModel::fit(p, x_train, y_train, x_valid, y_valid)),
        RegressorSpec::Knn { k } => Inner::Knn(KnnModel::fit(*k, x_train, y_train)),
        RegressorSpec::ConstantMean => Inner::Constant(y_train.iter().sum::<f64>() / y_train.len() as f64),
    };
    Ok(FittedModel {
        inner,
        n_features: x_train.ncols(),
    })
}

impl FittedModel {
    pub fn constant(value: f64, n_features: usize) -> Self {
        Self {
            inner: Inner::Constant(value),
            n_features,
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.n_features {
            return Err(Error::ShapeMismatch(format!(
                "model has {} features, input has {}",
                self.n_features,
                x.ncols()
            )));
        }
        Ok(match &self.inner {
            Inner::Constant(c) => vec![*c; x.nrows()],
            Inner::Knn(m) => m.predict(x),
            Inner::Boosted(m) => {
                let rows: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
                rows.par_iter().map(|r| m.predict_row(r)).collect()
            }
        })
    }

    pub fn boost_trace(&self) -> Option<&BoostTrace> {
        match &self.inner {
            Inner::Boosted(m) => Some(&m.trace),
            _ => None,
        }
    }

    pub fn info(&self) -> FitInfo {
        match &self.inner {
            Inner::Boosted(m) => FitInfo {
                kind: "boosted_trees",
                rounds_used: Some(m.trace.rounds_used),
                best_valid_mse: m
                    .trace
                    .valid_mse
                    .iter()
                    .cloned()
                    .fold(None, |a: Option<f64>, v| Some(a.map_or(v, |a| a.min(v)))),
            },
            Inner::Knn(_) => FitInfo {
                kind: "knn",
                rounds_used: None,
                best_valid_mse: None,
            },
            Inner::Constant(_) => FitInfo {
                kind: "constant_mean",
                rounds_used: None,
                best_valid_mse: None,
            },
        }
    }
}
