use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indtest::{HsicMethod, DEFAULT_GAMMA_MIN, DEFAULT_PERMUTATIONS, MIN_PERMUTATIONS};
use crate::rankdep::Transform;
use crate::regress::{Mode, RegressorSpec, DEFAULT_BIG};

/// Everything that determines a multisplit analysis besides the data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub mode: Mode,
    /// Number of random half splits; each is used in both orientations.
    #[serde(rename = "B")]
    pub splits: usize,
    pub alpha: f64,
    pub alpha_tilde: f64,
    pub g: Transform,
    pub regressor: RegressorSpec,
    pub master_seed: u64,
    pub hsic: HsicMethod,
    pub n_permutations: usize,
    pub gamma_min: f64,
    /// Magnitude of the location-scale fallback residual.
    pub big: f64,
    pub standardize_foci: bool,
}

impl AnalysisConfig {
    /// Defaults for the given noise model: absolute transform for additive
    /// noise, identity for location-scale.
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            splits: 25,
            alpha: 0.05,
            alpha_tilde: 0.01,
            g: match mode {
                Mode::Anm => Transform::Absolute,
                Mode::Lsnm => Transform::Identity,
            },
            regressor: RegressorSpec::default(),
            master_seed: 0,
            hsic: HsicMethod::Permutation,
            n_permutations: DEFAULT_PERMUTATIONS,
            gamma_min: DEFAULT_GAMMA_MIN,
            big: DEFAULT_BIG,
            standardize_foci: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.splits < 1 {
            return bad("B must be at least 1".into());
        }
        for (name, v) in [("alpha", self.alpha), ("alpha_tilde", self.alpha_tilde)] {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} = {v} not in (0, 1)"));
            }
        }
        if !(self.gamma_min > 0.0 && self.gamma_min < 1.0) {
            return bad(format!("gamma_min = {} not in (0, 1)", self.gamma_min));
        }
        if self.hsic == HsicMethod::Permutation && self.n_permutations < MIN_PERMUTATIONS {
            return bad(format!("need at least {MIN_PERMUTATIONS} permutations"));
        }
        if !(self.big > 0.0 && self.big.is_finite()) {
            return bad(format!("big = {} must be positive", self.big));
        }
        self.regressor.validate()
    }
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self::new(Mode::Anm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_defaults() {
        assert_eq!(AnalysisConfig::new(Mode::Anm).g, Transform::Absolute);
        assert_eq!(AnalysisConfig::new(Mode::Lsnm).g, Transform::Identity);
        let c = AnalysisConfig::default();
        assert_eq!((c.splits, c.alpha, c.alpha_tilde), (25, 0.05, 0.01));
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_levels() {
        let mut c = AnalysisConfig::default();
        c.alpha = 1.5;
        assert!(c.validate().is_err());
        let mut c = AnalysisConfig::default();
        c.splits = 0;
        assert!(c.validate().is_err());
        let mut c = AnalysisConfig::default();
        c.n_permutations = 3;
        assert!(c.validate().is_err());
    }

    #[test]
    fn json_uses_symbol_names() {
        let text = serde_json::to_string(&AnalysisConfig::default()).unwrap();
        assert!(text.contains("\"B\":25"));
        assert!(text.contains("\"g\":\"absolute\""));
        let back: AnalysisConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, AnalysisConfig::default());
    }
}
