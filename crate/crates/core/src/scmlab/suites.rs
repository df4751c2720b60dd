//! Built-in benchmark models.

use rand::seq::SliceRandom;
use rand::Rng;

use super::spec::{EdgeFn, Mechanism, NodeSpec, Noise, NoiseLaw, ScmSpec, Term};
use crate::error::Result;
use crate::tabular::RngStream;

const PILOT_ROWS: usize = 10_000;

fn node(name: &str, law: NoiseLaw, variance: f64, mechanism: Mechanism) -> NodeSpec {
    NodeSpec {
        name: name.into(),
        noise: Noise { law, variance },
        mechanism,
    }
}

fn additive(terms: &[(&str, EdgeFn)]) -> Mechanism {
    Mechanism::Additive {
        terms: terms
            .iter()
            .map(|(p, f)| Term {
                parent: (*p).into(),
                f: *f,
            })
            .collect(),
    }
}

fn edges(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs.iter().map(|(a, b)| ((*a).into(), (*b).into())).collect()
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| (*s).into()).collect()
}

const LIN: EdgeFn = EdgeFn::Linear { coef: 1.0 };

/// Hidden confounder of a predictor and the target, with a mediated path:
/// `H → X1, H → Y, X1 → X2 → Y`, observed `{X1, X2}`.
pub fn fig1_left() -> ScmSpec {
    let n = NoiseLaw::Normal;
    ScmSpec {
        nodes: vec![
            node("H", n, 1.0, additive(&[])),
            node("X1", n, 1.0, additive(&[("H", LIN)])),
            node("X2", n, 1.0, additive(&[("X1", LIN)])),
            node("Y", n, 1.0, additive(&[("H", LIN), ("X2", LIN)])),
        ],
        edges: edges(&[("H", "X1"), ("H", "Y"), ("X1", "X2"), ("X2", "Y")]),
        observed: names(&["X1", "X2"]),
        target: "Y".into(),
        separable: true,
    }
}

/// Hidden mediator: `X1 → X2 → H → Y, X1 → Y`, observed `{X1, X2}`.
pub fn fig1_right() -> ScmSpec {
    let n = NoiseLaw::Normal;
    ScmSpec {
        nodes: vec![
            node("X1", n, 1.0, additive(&[])),
            node("X2", n, 1.0, additive(&[("X1", LIN)])),
            node("H", n, 1.0, additive(&[("X2", LIN)])),
            node("Y", n, 1.0, additive(&[("H", LIN), ("X1", LIN)])),
        ],
        edges: edges(&[("X1", "X2"), ("X2", "H"), ("H", "Y"), ("X1", "Y")]),
        observed: names(&["X1", "X2"]),
        target: "Y".into(),
        separable: true,
    }
}

pub const FIG2_PREDICTORS: [&str; 5] = ["X1", "X2", "X3", "X4", "X5"];

fn power_params<R: Rng>(g: &mut R) -> EdgeFn {
    let coef = |g: &mut R| {
        let m = g.gen_range(0.2..2.0);
        if g.gen_bool(0.5) {
            m
        } else {
            -m
        }
    };
    EdgeFn::Power {
        a1: coef(g),
        b1: g.gen_range(0.5..2.0),
        a2: coef(g),
        b2: g.gen_range(0.5..2.0),
        scale: 1.0,
    }
}

/// The six-node benchmark `X1 → X2 → X3 → Y, X1 → Y, Y → X4`, `X5` isolated,
/// with random non-monotone edge functions and noise laws, all five
/// predictors observed. Edge functions are divided by their standard
/// deviation on a pilot sample.
pub fn fig2_suite(seed: u64) -> Result<ScmSpec> {
    let root = RngStream::new(seed);
    let mut g = root.child(0).rng();
    let mut laws = [
        NoiseLaw::Normal,
        NoiseLaw::Normal,
        NoiseLaw::Uniform,
        NoiseLaw::Uniform,
        NoiseLaw::Laplace,
        NoiseLaw::Laplace,
    ];
    laws.shuffle(&mut g);
    let mut f = || power_params(&mut g);
    let mut spec = ScmSpec {
        nodes: vec![
            node("X1", laws[0], 1.0, additive(&[])),
            node("X2", laws[1], 0.25, additive(&[("X1", f())])),
            node("X3", laws[2], 0.25, additive(&[("X2", f())])),
            node("Y", laws[3], 0.25, additive(&[("X1", f()), ("X3", f())])),
            node("X4", laws[4], 0.25, additive(&[("Y", f())])),
            node("X5", laws[5], 1.0, additive(&[])),
        ],
        edges: edges(&[("X1", "X2"), ("X2", "X3"), ("X3", "Y"), ("X1", "Y"), ("Y", "X4")]),
        observed: names(&FIG2_PREDICTORS),
        target: "Y".into(),
        separable: true,
    };
    let order = spec.dag()?.topological_order().to_vec();
    let pilot = root.child(1);
    for v in order {
        let (vals, _) = spec.sample_all(PILOT_ROWS, &pilot)?;
        let parents_vals: Vec<Vec<f64>> = match &spec.nodes[v].mechanism {
            Mechanism::Additive { terms } => terms
                .iter()
                .map(|t| {
                    let col = &vals[spec.index(&t.parent).expect("validated")];
                    col.iter().map(|&x| t.f.eval(x)).collect()
                })
                .collect(),
            Mechanism::Scale { .. } => unreachable!("additive suite"),
        };
        if let Mechanism::Additive { terms } = &mut spec.nodes[v].mechanism {
            for (t, out) in terms.iter_mut().zip(parents_vals) {
                let sd = std_dev(&out);
                if let EdgeFn::Power { scale, .. } = &mut t.f {
                    if sd > 0.0 {
                        *scale = sd;
                    }
                }
            }
        }
    }
    Ok(spec)
}

fn std_dev(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / n).sqrt()
}

/// All 3-element observed subsets of the five predictors, lexicographic.
pub fn fig2_subsets() -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..5 {
        for b in a + 1..5 {
            for c in b + 1..5 {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Parameters of the location-scale benchmark.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LsnmParams {
    pub amplitude: f64,
    pub frequency: f64,
    pub x1_noise_var: f64,
    pub x2_noise_var: f64,
}

impl Default for LsnmParams {
    fn default() -> Self {
        Self {
            amplitude: 2.0,
            frequency: 2.0,
            x1_noise_var: 0.09,
            x2_noise_var: 0.25,
        }
    }
}

/// Location-scale benchmark: `H → X1` sinusoidal, `X1 → X2` linear and
/// `Y = (0.5 + |X2|) · H`, with observed `{X1, X2}`.
pub fn lsnm_suite() -> ScmSpec {
    lsnm_suite_with(&LsnmParams::default())
}

pub fn lsnm_suite_with(p: &LsnmParams) -> ScmSpec {
    let n = NoiseLaw::Normal;
    ScmSpec {
        nodes: vec![
            node("H", n, 1.0, additive(&[])),
            node(
                "X1",
                n,
                p.x1_noise_var,
                additive(&[(
                    "H",
                    EdgeFn::Sine {
                        amplitude: p.amplitude,
                        frequency: p.frequency,
                    },
                )]),
            ),
            node("X2", n, p.x2_noise_var, additive(&[("X1", LIN)])),
            node(
                "Y",
                n,
                0.0,
                Mechanism::Scale {
                    location: vec![],
                    scale: Term {
                        parent: "X2".into(),
                        f: EdgeFn::AbsAffine {
                            intercept: 0.5,
                            slope: 1.0,
                        },
                    },
                    factor: "H".into(),
                },
            ),
        ],
        edges: edges(&[("H", "X1"), ("X1", "X2"), ("H", "Y"), ("X2", "Y")]),
        observed: names(&["X1", "X2"]),
        target: "Y".into(),
        separable: true,
    }
}

/// Population normalised residual of the location-scale suite given both
/// predictors: `(H - E[H | X1]) / sd(H | X1)`, with the posterior moments
/// integrated numerically on a fine grid.
pub fn lsnm_population_residual(p: &LsnmParams, x1: &[f64], h: &[f64]) -> Vec<f64> {
    const GRID: usize = 2001;
    const LIM: f64 = 8.0;
    let step = 2.0 * LIM / (GRID - 1) as f64;
    let hs: Vec<f64> = (0..GRID).map(|k| -LIM + k as f64 * step).collect();
    let prior: Vec<f64> = hs.iter().map(|t| (-0.5 * t * t).exp()).collect();
    let mean_x1: Vec<f64> = hs.iter().map(|t| p.amplitude * (p.frequency * t).sin()).collect();
    x1.iter()
        .zip(h)
        .map(|(&x, &hv)| {
            let (mut w0, mut w1, mut w2) = (0.0, 0.0, 0.0);
            for k in 0..GRID {
                let d = x - mean_x1[k];
                let w = prior[k] * (-0.5 * d * d / p.x1_noise_var).exp();
                w0 += w;
                w1 += w * hs[k];
                w2 += w * hs[k] * hs[k];
            }
            let mu = w1 / w0;
            let var = (w2 / w0 - mu * mu).max(f64::MIN_POSITIVE);
            (hv - mu) / var.sqrt()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig2_is_valid_and_seeded() {
        let a = fig2_suite(1).unwrap();
        assert_eq!(a, fig2_suite(1).unwrap());
        assert_ne!(a, fig2_suite(2).unwrap());
        let laws: Vec<NoiseLaw> = a.nodes.iter().map(|n| n.noise.law).collect();
        for law in [NoiseLaw::Normal, NoiseLaw::Uniform, NoiseLaw::Laplace] {
            assert_eq!(laws.iter().filter(|&&l| l == law).count(), 2);
        }
        assert_eq!(fig2_subsets().len(), 10);
    }

    #[test]
    fn fig2_edges_are_standardized() {
        let spec = fig2_suite(7).unwrap();
        let (vals, _) = spec.sample_all(20_000, &RngStream::new(99)).unwrap();
        let x2 = spec.index("X2").unwrap();
        // unit-variance signal plus noise of variance 1/4
        let v = std_dev(&vals[x2]).powi(2);
        assert!((1.0..1.6).contains(&v), "{v}");
    }

    #[test]
    fn lsnm_hides_confounder() {
        let s = lsnm_suite().sample(100, &RngStream::new(0)).unwrap();
        assert_eq!(s.data.names(), &["X1".to_string(), "X2".to_string()]);
        assert_eq!(s.hidden.len(), 1);
        assert_eq!(s.hidden[0].0, "H");
        assert_eq!(s.eps_true, s.hidden[0].1);
    }

    #[test]
    fn lsnm_conditional_scale() {
        let s = lsnm_suite().sample(10_000, &RngStream::new(4)).unwrap();
        let x2 = s.data.column(1);
        let y = s.data.y();
        let bin = |lo: f64, hi: f64| {
            let v: Vec<f64> = x2
                .iter()
                .zip(y)
                .filter(|(x, _)| (lo..hi).contains(&x.abs()))
                .map(|(_, &y)| y)
                .collect();
            let xs: Vec<f64> = x2
                .iter()
                .filter(|x| (lo..hi).contains(&x.abs()))
                .map(|x| (0.5 + x.abs()).powi(2))
                .collect();
            (std_dev(&v).powi(2), xs.iter().sum::<f64>() / xs.len() as f64)
        };
        let (v_lo, g_lo) = bin(0.0, 0.3);
        let (v_hi, g_hi) = bin(1.5, 2.0);
        let ratio = (v_hi / v_lo) / (g_hi / g_lo);
        assert!((0.7..1.3).contains(&ratio), "{ratio}");
    }

    #[test]
    fn population_residual_standardizes() {
        let s = lsnm_suite().sample(20_000, &RngStream::new(5)).unwrap();
        let e = lsnm_population_residual(&LsnmParams::default(), &s.data.column(0), &s.hidden[0].1);
        let m = e.iter().sum::<f64>() / e.len() as f64;
        let v = std_dev(&e).powi(2);
        assert!(m.abs() < 0.05, "{m}");
        assert!((v - 1.0).abs() < 0.05, "{v}");
    }
}
