//! Conditional-mean regression and residuals for additive and location-scale
//! noise models.

mod gbdt;
mod knn;
mod model;
mod residuals;
mod spec;

pub use gbdt::BoostTrace;
pub use model::{fit, FitInfo, FittedModel};
pub use residuals::{
    fit_moments, normalize_from_moments, residualize_anm, residualize_lsnm, Mode, Residuals, DEFAULT_BIG,
};
pub use spec::{BoostParams, RegressorSpec};
