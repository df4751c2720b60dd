use serde::Serialize;

use super::graph::d_separated;
use super::spec::ScmSpec;
use crate::error::{Error, Result};

/// Graphical ground truth for one observed set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroundTruth {
    /// Positions in the observed list, ascending.
    pub w_true: Vec<usize>,
    pub w_true_names: Vec<String>,
    pub global_ok: bool,
    pub n_observed: usize,
}

/// Predictors whose effect on the target is causally well-specified.
///
/// The target gets an explicit exogenous parent `ε`; with `A` the hidden
/// parents of the target plus `ε`, predictor `j` qualifies when `A` is
/// d-separated from `X_j` given the other observed predictors.
pub fn ground_truth_w(spec: &ScmSpec) -> Result<GroundTruth> {
    if !spec.separable {
        return Err(Error::NotSeparable);
    }
    let dag = spec.dag()?;
    let y = spec.index(&spec.target)?;
    let (aug, eps) = dag.with_exogenous("\u{3b5}", y)?;
    let m: Vec<usize> = spec.observed.iter().map(|n| spec.index(n)).collect::<Result<_>>()?;
    let mut a: Vec<usize> = dag.parents(y).iter().copied().filter(|v| !m.contains(v)).collect();
    a.push(eps);
    let mut w_true = Vec::new();
    for (k, &j) in m.iter().enumerate() {
        let rest: Vec<usize> = m.iter().copied().filter(|&v| v != j).collect();
        if d_separated(&aug, &a, &[j], &rest)? {
            w_true.push(k);
        }
    }
    let global_ok = d_separated(&aug, &a, &m, &[])?;
    Ok(GroundTruth {
        w_true_names: w_true.iter().map(|&k| spec.observed[k].clone()).collect(),
        w_true,
        global_ok,
        n_observed: m.len(),
    })
}
