use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostParams {
    pub max_rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub early_stop_patience: usize,
    /// Upper bound on candidate thresholds per feature.
    pub max_bins: usize,
}

impl Default for BoostParams {
    fn default() -> Self {
        Self {
            max_rounds: 500,
            learning_rate: 0.1,
            max_depth: 3,
            min_leaf: 5,
            early_stop_patience: 20,
            max_bins: 255,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegressorSpec {
    BoostedTrees(BoostParams),
    Knn { k: usize },
    ConstantMean,
}

impl Default for RegressorSpec {
    fn default() -> Self {
        RegressorSpec::BoostedTrees(BoostParams::default())
    }
}

impl RegressorSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            RegressorSpec::BoostedTrees(b) => {
                let bad = |what: &str| Err(Error::InvalidArgument(what.to_owned()));
                if b.max_rounds < 1 {
                    return bad("max_rounds must be at least 1");
                }
                if !(b.learning_rate > 0.0 && b.learning_rate <= 1.0) {
                    return bad("learning_rate must be in (0, 1]");
                }
                if b.max_depth < 1 {
                    return bad("max_depth must be at least 1");
                }
                if b.min_leaf < 1 {
                    return bad("min_leaf must be at least 1");
                }
                if b.early_stop_patience < 1 {
                    return bad("early_stop_patience must be at least 1");
                }
                if !(2..=65_535).contains(&b.max_bins) {
                    return bad("max_bins must be in [2, 65535]");
                }
                Ok(())
            }
            RegressorSpec::Knn { k } if *k < 1 => Err(Error::InvalidArgument("knn needs k >= 1".into())),
            _ => Ok(()),
        }
    }

    /// Smallest training set the spec can fit.
    pub fn min_train_rows(&self) -> usize {
        match self {
            RegressorSpec::BoostedTrees(b) => 2 * b.min_leaf,
            RegressorSpec::Knn { .. } | RegressorSpec::ConstantMean => 1,
        }
    }
}
