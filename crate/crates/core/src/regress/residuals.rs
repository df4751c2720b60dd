use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::model::{fit, FittedModel};
use super::spec::RegressorSpec;
use crate::error::{Error, Result};

pub const DEFAULT_BIG: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Additive noise: `y = f(x) + ε`.
    Anm,
    /// Location-scale noise: `y = f(x) + g(x) ε`.
    Lsnm,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Anm => "anm",
            Mode::Lsnm => "lsnm",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residuals {
    pub eps_hat: Vec<f64>,
    pub mode: Mode,
    /// Rows whose variance estimate was not positive (location-scale only).
    pub fallback_count: usize,
}

pub fn residualize_anm(model: &FittedModel, x: ArrayView2<'_, f64>, y: &[f64]) -> Result<Residuals> {
    if x.nrows() != y.len() {
        return Err(Error::ShapeMismatch(format!("{} rows, {} targets", x.nrows(), y.len())));
    }
    let pred = model.predict(x)?;
    Ok(Residuals {
        eps_hat: y.iter().zip(&pred).map(|(a, b)| a - b).collect(),
        mode: Mode::Anm,
        fallback_count: 0,
    })
}

/// Fit `E[Y | X]` and `E[Y² | X]` with the same spec.
pub fn fit_moments(
    spec: &RegressorSpec,
    x_train: ArrayView2<'_, f64>,
    y_train: &[f64],
    x_valid: ArrayView2<'_, f64>,
    y_valid: &[f64],
) -> Result<(FittedModel, FittedModel)> {
    let f1 = fit(spec, x_train, y_train, x_valid, y_valid)?;
    let sq = |v: &[f64]| v.iter().map(|a| a * a).collect::<Vec<_>>();
    let f2 = fit(spec, x_train, &sq(y_train), x_valid, &sq(y_valid))?;
    Ok((f1, f2))
}

/// Normalised residuals from predicted first and second moments.
///
/// Where the implied variance `m2 - m1²` is not positive (or the quotient is
/// not finite) the residual is `±big` with the sign of `y - m1`; a zero
/// difference counts as positive.
pub fn normalize_from_moments(m1: &[f64], m2: &[f64], y: &[f64], big: f64) -> Result<Residuals> {
    if m1.len() != y.len() || m2.len() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} targets, {} and {} moment predictions",
            y.len(),
            m1.len(),
            m2.len()
        )));
    }
    if !(big > 0.0 && big.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "fallback magnitude {big} must be positive"
        )));
    }
    let mut fallback_count = 0;
    let eps_hat = y
        .iter()
        .zip(m1.iter().zip(m2))
        .map(|(&yi, (&a, &b))| {
            let var = b - a * a;
            let d = yi - a;
            let e = d / var.sqrt();
            if var > 0.0 && e.is_finite() {
                e
            } else {
                fallback_count += 1;
                if d < 0.0 {
                    -big
                } else {
                    big
                }
            }
        })
        .collect();
    Ok(Residuals {
        eps_hat,
        mode: Mode::Lsnm,
        fallback_count,
    })
}

pub fn residualize_lsnm(
    f1: &FittedModel,
    f2: &FittedModel,
    x: ArrayView2<'_, f64>,
    y: &[f64],
    big: f64,
) -> Result<Residuals> {
    normalize_from_moments(&f1.predict(x)?, &f2.predict(x)?, y, big)
}
