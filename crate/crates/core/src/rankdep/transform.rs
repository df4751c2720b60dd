use serde::{Deserialize, Serialize};

/// Residual transform applied before FOCI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    Absolute,
    Identity,
}

impl Transform {
    pub fn as_str(self) -> &'static str {
        match self {
            Transform::Absolute => "absolute",
            Transform::Identity => "identity",
        }
    }
}

pub fn transform_g(eps: &[f64], mode: Transform) -> Vec<f64> {
    match mode {
        Transform::Absolute => eps.iter().map(|e| e.abs()).collect(),
        Transform::Identity => eps.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absolute() {
        assert_eq!(transform_g(&[-1.0, 2.0], Transform::Absolute), [1.0, 2.0]);
    }

    #[test]
    fn identity() {
        let v = [-0.5, 3.0, -0.0];
        let out = transform_g(&v, Transform::Identity);
        assert!(out.iter().zip(&v).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}
