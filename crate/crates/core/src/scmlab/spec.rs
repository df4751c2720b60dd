use std::collections::HashSet;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::graph::Dag;
use crate::error::{Error, Result};
use crate::tabular::{Dataset, RngStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseLaw {
    Normal,
    Uniform,
    Laplace,
}

/// Centred noise with the given variance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Noise {
    pub law: NoiseLaw,
    pub variance: f64,
}

impl Noise {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let v = self.variance;
        match self.law {
            NoiseLaw::Normal => v.sqrt() * Distribution::<f64>::sample(&StandardNormal, rng),
            NoiseLaw::Uniform => {
                let h = (3.0 * v).sqrt();
                rng.gen_range(-h..=h)
            }
            NoiseLaw::Laplace => {
                let b = (v / 2.0).sqrt();
                let u: f64 = rng.gen_range(-0.5..0.5);
                -b * u.signum() * (1.0 - 2.0 * u.abs()).ln()
            }
        }
    }
}

/// Univariate function applied to one parent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeFn {
    Linear {
        coef: f64,
    },
    /// `(a1 |x|^b1 sign(x) + a2 |x|^b2) / scale`
    Power {
        a1: f64,
        b1: f64,
        a2: f64,
        b2: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Sine {
        amplitude: f64,
        frequency: f64,
    },
    /// `intercept + slope |x|`
    AbsAffine {
        intercept: f64,
        slope: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl EdgeFn {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            EdgeFn::Linear { coef } => coef * x,
            EdgeFn::Power { a1, b1, a2, b2, scale } => {
                (a1 * x.abs().powf(b1) * x.signum() + a2 * x.abs().powf(b2)) / scale
            }
            EdgeFn::Sine { amplitude, frequency } => amplitude * (frequency * x).sin(),
            EdgeFn::AbsAffine { intercept, slope } => intercept + slope * x.abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub parent: String,
    pub f: EdgeFn,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mechanism {
    /// `Σ f_k(parent_k) + noise`
    Additive { terms: Vec<Term> },
    /// `Σ location + scale.f(scale.parent) · factor + noise`
    Scale {
        #[serde(default)]
        location: Vec<Term>,
        scale: Term,
        factor: String,
    },
}

impl Mechanism {
    fn referenced(&self) -> Vec<&str> {
        match self {
            Mechanism::Additive { terms } => terms.iter().map(|t| t.parent.as_str()).collect(),
            Mechanism::Scale {
                location,
                scale,
                factor,
            } => location
                .iter()
                .map(|t| t.parent.as_str())
                .chain([scale.parent.as_str(), factor.as_str()])
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub name: String,
    pub noise: Noise,
    pub mechanism: Mechanism,
}

/// Structural causal model with an observed predictor set and a target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScmSpec {
    pub nodes: Vec<NodeSpec>,
    pub edges: Vec<(String, String)>,
    pub observed: Vec<String>,
    pub target: String,
    /// Author's assertion that the target mechanism is additively separable
    /// in its parents; required for graphical ground truth.
    #[serde(default)]
    pub separable: bool,
}

/// Draws from a model: the observed dataset plus oracle-only values.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub data: Dataset,
    /// Every node that is neither observed nor the target.
    pub hidden: Vec<(String, Vec<f64>)>,
    /// Target innovation: its noise draw for additive mechanisms, and
    /// `factor + noise / scale` for scale mechanisms.
    pub eps_true: Vec<f64>,
}

impl ScmSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.dag()?;
        Ok(spec)
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.nodes
            .iter()
            .position(|n| n.name == name)
            .ok_or_else(|| Error::UnknownNode(name.to_owned()))
    }

    /// Validates the spec and returns its graph.
    pub fn dag(&self) -> Result<Dag> {
        let names: Vec<String> = self.nodes.iter().map(|n| n.name.clone()).collect();
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::InvalidSpec(format!("duplicate node '{n}'")));
            }
        }
        let edges = self
            .edges
            .iter()
            .map(|(a, b)| Ok((self.index(a)?, self.index(b)?)))
            .collect::<Result<Vec<_>>>()?;
        let dag = Dag::new(names, &edges)?;
        for (v, node) in self.nodes.iter().enumerate() {
            for r in node.mechanism.referenced() {
                let u = self.index(r)?;
                if !dag.parents(v).contains(&u) {
                    return Err(Error::InvalidSpec(format!(
                        "'{}' uses '{r}' which is not a parent",
                        node.name
                    )));
                }
            }
            if !(node.noise.variance >= 0.0 && node.noise.variance.is_finite()) {
                return Err(Error::InvalidSpec(format!(
                    "'{}' has invalid noise variance",
                    node.name
                )));
            }
        }
        let y = self.index(&self.target)?;
        let mut obs = HashSet::new();
        for m in &self.observed {
            if self.index(m)? == y {
                return Err(Error::InvalidSpec("target cannot be observed as a predictor".into()));
            }
            if !obs.insert(m) {
                return Err(Error::InvalidSpec(format!("'{m}' observed twice")));
            }
        }
        if self.observed.is_empty() {
            return Err(Error::NoPredictors);
        }
        Ok(dag)
    }

    /// Same model with another observed set.
    pub fn with_observed(&self, observed: &[&str]) -> Result<Self> {
        let mut s = self.clone();
        s.observed = observed.iter().map(|s| s.to_string()).collect();
        s.dag()?;
        Ok(s)
    }

    /// Ancestral sampling of every node; node `v` draws its noise from
    /// `rng.child(v)`, so columns do not depend on evaluation order.
    pub fn sample_all(&self, n: usize, rng: &RngStream) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        let dag = self.dag()?;
        let q = self.nodes.len();
        let y = self.index(&self.target)?;
        let mut vals: Vec<Vec<f64>> = vec![Vec::new(); q];
        let mut eps_true = Vec::new();
        for &v in dag.topological_order() {
            let node = &self.nodes[v];
            let mut g = rng.child(v as u64).rng();
            let noise: Vec<f64> = (0..n).map(|_| node.noise.draw(&mut g)).collect();
            let col_of = |name: &str| &vals[self.index(name).expect("validated")];
            let sum_terms =
                |terms: &[Term], i: usize| -> f64 { terms.iter().map(|t| t.f.eval(col_of(&t.parent)[i])).sum() };
            let col: Vec<f64> = match &node.mechanism {
                Mechanism::Additive { terms } => {
                    if v == y {
                        eps_true = noise.clone();
                    }
                    (0..n).map(|i| sum_terms(terms, i) + noise[i]).collect()
                }
                Mechanism::Scale {
                    location,
                    scale,
                    factor,
                } => {
                    let s: Vec<f64> = (0..n).map(|i| scale.f.eval(col_of(&scale.parent)[i])).collect();
                    let fac = col_of(factor);
                    if v == y {
                        eps_true = (0..n)
                            .map(|i| if s[i] != 0.0 { fac[i] + noise[i] / s[i] } else { fac[i] })
                            .collect();
                    }
                    (0..n)
                        .map(|i| sum_terms(location, i) + s[i] * fac[i] + noise[i])
                        .collect()
                }
            };
            vals[v] = col;
        }
        Ok((vals, eps_true))
    }

    pub fn sample(&self, n: usize, rng: &RngStream) -> Result<Sample> {
        let (mut vals, eps_true) = self.sample_all(n, rng)?;
        let y = self.index(&self.target)?;
        let columns = self
            .observed
            .iter()
            .map(|m| Ok((m.clone(), vals[self.index(m)?].clone())))
            .collect::<Result<Vec<_>>>()?;
        let hidden = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(v, node)| *v != y && !self.observed.contains(&node.name))
            .map(|(v, node)| (node.name.clone(), vals[v].clone()))
            .collect();
        let data = Dataset::from_columns(columns, self.target.clone(), std::mem::take(&mut vals[y]))?;
        Ok(Sample { data, hidden, eps_true })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(var_y: f64) -> ScmSpec {
        ScmSpec {
            nodes: vec![
                NodeSpec {
                    name: "x".into(),
                    noise: Noise {
                        law: NoiseLaw::Normal,
                        variance: 1.0,
                    },
                    mechanism: Mechanism::Additive { terms: vec![] },
                },
                NodeSpec {
                    name: "y".into(),
                    noise: Noise {
                        law: NoiseLaw::Normal,
                        variance: var_y,
                    },
                    mechanism: Mechanism::Additive {
                        terms: vec![Term {
                            parent: "x".into(),
                            f: EdgeFn::Sine {
                                amplitude: 2.0,
                                frequency: 1.5,
                            },
                        }],
                    },
                },
            ],
            edges: vec![("x".into(), "y".into())],
            observed: vec!["x".into()],
            target: "y".into(),
            separable: true,
        }
    }

    #[test]
    fn zero_noise_is_functional() {
        let s = chain(0.0).sample(100, &RngStream::new(1)).unwrap();
        for (x, y) in s.data.column(0).iter().zip(s.data.y()) {
            assert_eq!(*y, 2.0 * (1.5 * x).sin());
        }
        assert!(s.eps_true.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn deterministic_draws() {
        let a = chain(1.0).sample(50, &RngStream::new(3)).unwrap();
        let b = chain(1.0).sample(50, &RngStream::new(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noise_laws_match_moments() {
        for law in [NoiseLaw::Normal, NoiseLaw::Uniform, NoiseLaw::Laplace] {
            let noise = Noise { law, variance: 2.0 };
            let mut g = RngStream::new(9).rng();
            let v: Vec<f64> = (0..10_000).map(|_| noise.draw(&mut g)).collect();
            let mean = v.iter().sum::<f64>() / 1e4;
            let var = v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / 1e4;
            assert!(mean.abs() < 0.1, "{law:?} {mean}");
            assert!((var / 2.0 - 1.0).abs() < 0.15, "{law:?} {var}");
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = chain(1.0);
        s.edges.push(("y".into(), "x".into()));
        assert!(matches!(s.dag(), Err(Error::NotAcyclic)));
        let mut s = chain(1.0);
        s.edges.clear();
        assert!(matches!(s.dag(), Err(Error::InvalidSpec(_))));
        let mut s = chain(1.0);
        s.observed = vec!["y".into()];
        assert!(s.dag().is_err());
        let mut s = chain(1.0);
        s.target = "z".into();
        assert!(matches!(s.dag(), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn json_roundtrip() {
        let s = chain(0.5);
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"kind\":\"sine\""));
        assert_eq!(ScmSpec::from_json(&text).unwrap(), s);
    }
}
