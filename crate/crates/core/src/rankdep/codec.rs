//! Rank/nearest-neighbour conditional dependence coefficient.
//!
//! All sums are integers, so the statistics are returned as exact rationals.
//!
//! * `Q_n = (1/n²) Σ_i [min(R_i, R_M(i)) − L_i²/n]`
//! * unconditional `S_n = (1/n³) Σ_i L_i (n − L_i)`
//! * conditional `S_n = (1/n²) Σ_i [R_i − min(R_i, R_N(i))]`
//!
//! where `M(i)` is the nearest neighbour of row `i` among the predictors and,
//! for the conditional coefficient, `N(i)` its nearest neighbour among the
//! baseline predictors only.

use ndarray::{concatenate, ArrayView2, Axis};
use num_rational::Ratio;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::neighbors::{nearest_neighbors, NeighborMap};
use super::ranks::{ranks, RankVector};
use crate::error::{Error, Result};
use crate::tabular::RngStream;

pub type Rational = Ratio<i128>;

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn check_sizes(ranks: &RankVector, nn: &NeighborMap) -> Result<usize> {
    if ranks.len() != nn.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} ranks, {} neighbour entries",
            ranks.len(),
            nn.len()
        )));
    }
    if ranks.is_empty() {
        return Err(Error::TooFewRows { n: 0, min: 1 });
    }
    Ok(ranks.len())
}

fn sum_min_neighbor(ranks: &RankVector, nn: &NeighborMap) -> i128 {
    ranks
        .r
        .iter()
        .zip(&nn.m)
        .map(|(&ri, &j)| ri.min(ranks.r[j]) as i128)
        .sum()
}

pub fn codec_q(y_ranks: &RankVector, nn: &NeighborMap) -> Result<Rational> {
    let n = check_sizes(y_ranks, nn)? as i128;
    let sum_l2: i128 = y_ranks.l.iter().map(|&l| (l as i128) * (l as i128)).sum();
    Ok(Rational::new(n * sum_min_neighbor(y_ranks, nn) - sum_l2, n * n * n))
}

pub fn codec_s_conditional(y_ranks: &RankVector, nn: &NeighborMap) -> Result<Rational> {
    let n = check_sizes(y_ranks, nn)? as i128;
    let sum_r: i128 = y_ranks.r.iter().map(|&r| r as i128).sum();
    Ok(Rational::new(sum_r - sum_min_neighbor(y_ranks, nn), n * n))
}

pub fn codec_s_unconditional(y_ranks: &RankVector) -> Rational {
    let n = y_ranks.len() as i128;
    if n == 0 {
        return Rational::from_integer(0);
    }
    let s: i128 = y_ranks.l.iter().map(|&l| (l as i128) * (n - l as i128)).sum();
    Rational::new(s, n * n * n)
}

/// `(Q_n, S_n)` for one response/predictor-set pair.
#[derive(Clone, Debug, PartialEq)]
pub struct DependenceStat {
    pub q_n: Rational,
    pub s_n: Rational,
    /// Whether `s_n` is the conditional normaliser.
    pub conditional: bool,
}

impl DependenceStat {
    /// `Q_n / S_n`, or `None` when the normaliser vanishes.
    pub fn t_n(&self) -> Option<Rational> {
        if self.s_n == Rational::from_integer(0) {
            None
        } else {
            Some(self.q_n / self.s_n)
        }
    }

    pub fn t_n_f64(&self) -> Option<f64> {
        self.t_n().map(|t| to_f64(&t))
    }

    pub fn is_undefined(&self) -> bool {
        self.t_n().is_none()
    }
}

impl Serialize for DependenceStat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("DependenceStat", 5)?;
        st.serialize_field("q_n", &to_f64(&self.q_n))?;
        st.serialize_field("s_n", &to_f64(&self.s_n))?;
        st.serialize_field("t_n", &self.t_n_f64())?;
        st.serialize_field("undefined", &self.is_undefined())?;
        st.serialize_field("conditional", &self.conditional)?;
        st.end()
    }
}

/// Dependence coefficient of `y` on `x_u`, optionally conditional on `baseline`.
///
/// Without a baseline the unconditional normaliser is used. With one, the
/// numerator compares neighbours in the joint `(baseline, x_u)` space against
/// neighbours in the baseline space alone. Neighbour ties draw from `rng`
/// (child 0 for the joint space, child 1 for the baseline).
pub fn codec_t(
    y: &[f64],
    x_u: ArrayView2<'_, f64>,
    rng: &RngStream,
    baseline: Option<ArrayView2<'_, f64>>,
) -> Result<DependenceStat> {
    if x_u.nrows() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} responses, {} predictor rows",
            y.len(),
            x_u.nrows()
        )));
    }
    let rv = ranks(y)?;
    match baseline {
        None => {
            let nn = nearest_neighbors(x_u, rng)?;
            Ok(DependenceStat {
                q_n: codec_q(&rv, &nn)?,
                s_n: codec_s_unconditional(&rv),
                conditional: false,
            })
        }
        Some(base) => {
            if base.nrows() != y.len() {
                return Err(Error::ShapeMismatch(format!(
                    "{} responses, {} baseline rows",
                    y.len(),
                    base.nrows()
                )));
            }
            let joint = concatenate(Axis(1), &[base.view(), x_u.view()]).map_err(|e| Error::Internal(e.to_string()))?;
            let nn_joint = nearest_neighbors(joint.view(), &rng.child(0))?;
            let nn_base = nearest_neighbors(base, &rng.child(1))?;
            let n = y.len() as i128;
            let q = sum_min_neighbor(&rv, &nn_joint) - sum_min_neighbor(&rv, &nn_base);
            Ok(DependenceStat {
                q_n: Rational::new(q, n * n),
                s_n: codec_s_conditional(&rv, &nn_base)?,
                conditional: true,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rankdep::neighbors::NeighborSearch;
    use crate::tabular::derive_rng;
    use ndarray::Array2;
    use proptest::prelude::*;
    use rand::Rng;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn fixed_map(m: Vec<usize>) -> NeighborMap {
        NeighborMap {
            m,
            tie_stream: derive_rng(0, &[]),
            tied_rows: 0,
        }
    }

    fn col(v: &[f64]) -> Array2<f64> {
        Array2::from_shape_vec((v.len(), 1), v.to_vec()).unwrap()
    }

    /// Literal evaluation of the defining sums with float arithmetic and
    /// quadratic rank counting.
    fn brute_q_s(y: &[f64], m: &[usize]) -> (f64, f64, f64) {
        let n = y.len();
        let rk: Vec<f64> = y.iter().map(|a| y.iter().filter(|b| *b <= a).count() as f64).collect();
        let lk: Vec<f64> = y.iter().map(|a| y.iter().filter(|b| *b >= a).count() as f64).collect();
        let nf = n as f64;
        let mut q = 0.0;
        let mut sc = 0.0;
        let mut su = 0.0;
        for i in 0..n {
            let mn = rk[i].min(rk[m[i]]);
            q += mn - lk[i] * lk[i] / nf;
            sc += rk[i] - mn;
            su += lk[i] * (nf - lk[i]);
        }
        (q / (nf * nf), sc / (nf * nf), su / (nf * nf * nf))
    }

    #[test]
    fn three_point_example() {
        let rv = ranks(&[1.0, 2.0, 3.0]).unwrap();
        let nn = fixed_map(vec![1, 0, 1]);
        assert_eq!(codec_q(&rv, &nn).unwrap(), r(-2, 27));
        assert_eq!(codec_s_conditional(&rv, &nn).unwrap(), r(2, 9));
        assert_eq!(codec_s_unconditional(&rv), r(4, 27));
        let conditional_form = codec_q(&rv, &nn).unwrap() / codec_s_conditional(&rv, &nn).unwrap();
        assert_eq!(conditional_form, r(-1, 3));
    }

    #[test]
    fn three_point_t_unconditional() {
        // x = [0, 1, 3] has no distance ties and the same neighbour map as above
        let st = codec_t(
            &[1.0, 2.0, 3.0],
            col(&[0.0, 1.0, 3.0]).view(),
            &derive_rng(0, &[]),
            None,
        )
        .unwrap();
        assert_eq!(st.t_n(), Some(r(-1, 2)));
        // closed form (n Σmin − ΣL²) / Σ L(n − L) = (12 − 14) / 4
        assert_eq!(st.t_n(), Some(r(12 - 14, 4)));
    }

    #[test]
    fn constant_response() {
        let rv = ranks(&[4.0, 4.0, 4.0]).unwrap();
        let nn = fixed_map(vec![1, 0, 1]);
        assert_eq!(codec_q(&rv, &nn).unwrap(), r(0, 1));
        assert_eq!(codec_s_conditional(&rv, &nn).unwrap(), r(0, 1));
        assert_eq!(codec_s_unconditional(&rv), r(0, 1));
        let st = codec_t(&[4.0; 3], col(&[0.0, 1.0, 3.0]).view(), &derive_rng(0, &[]), None).unwrap();
        assert!(st.is_undefined());
    }

    #[test]
    fn size_mismatch() {
        let rv = ranks(&[1.0, 2.0]).unwrap();
        assert!(codec_q(&rv, &fixed_map(vec![1, 0, 1])).is_err());
        assert!(codec_t(&[1.0, 2.0], col(&[0.0, 1.0, 2.0]).view(), &derive_rng(0, &[]), None).is_err());
    }

    #[test]
    fn distinct_closed_form() {
        for n in [3i128, 17, 200] {
            let v: Vec<f64> = (0..n).map(|i| ((i * 7919) % 1009) as f64).collect();
            let s = codec_s_unconditional(&ranks(&v).unwrap());
            let closed = r((n * n * n + n * n) / 2 - n * (n + 1) * (2 * n + 1) / 6, n * n * n);
            assert_eq!(s, closed);
        }
    }

    #[test]
    fn random_instances_match_formula_oracle() {
        for seed in 0..100 {
            let mut g = derive_rng(seed, &[31]).rng();
            let n = g.gen_range(2..=300);
            let y: Vec<f64> = (0..n).map(|_| g.gen_range(0..40) as f64).collect();
            let x = Array2::from_shape_fn((n, 2), |_| g.gen_range(0..15) as f64);
            let nn = nearest_neighbors(x.view(), &derive_rng(seed, &[32])).unwrap();
            let rv = ranks(&y).unwrap();
            let (q, sc, su) = brute_q_s(&y, &nn.m);
            let tol = 1e-12;
            assert!((to_f64(&codec_q(&rv, &nn).unwrap()) - q).abs() < tol);
            assert!((to_f64(&codec_s_conditional(&rv, &nn).unwrap()) - sc).abs() < tol);
            assert!((to_f64(&codec_s_unconditional(&rv)) - su).abs() < tol);
        }
    }

    #[test]
    fn independent_pair_is_near_zero() {
        use rand_distr::{Distribution, StandardNormal};
        for seed in 0..5 {
            let mut g = derive_rng(seed, &[40]).rng();
            let y: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut g)).collect();
            let x = Array2::from_shape_fn((10_000, 1), |_| StandardNormal.sample(&mut g));
            let t = codec_t(&y, x.view(), &derive_rng(seed, &[41]), None).unwrap();
            assert!(t.t_n_f64().unwrap().abs() < 0.05);
        }
    }

    #[test]
    fn functional_dependence_is_near_one() {
        let x: Vec<f64> = (0..2000).map(|i| i as f64 / 2000.0).collect();
        let y: Vec<f64> = x.iter().map(|v| (6.0 * v).sin()).collect();
        let t = codec_t(&y, col(&x).view(), &derive_rng(1, &[]), None).unwrap();
        assert!(t.t_n_f64().unwrap() > 0.95);
    }

    #[test]
    fn conditional_form_matches_numerator_difference() {
        let mut g = derive_rng(5, &[]).rng();
        let n = 150;
        let base = Array2::from_shape_fn((n, 1), |_| g.gen::<f64>());
        let extra = Array2::from_shape_fn((n, 1), |_| g.gen::<f64>());
        let y: Vec<f64> = (0..n).map(|i| base[[i, 0]] + extra[[i, 0]]).collect();
        let rng = derive_rng(5, &[1]);
        let st = codec_t(&y, extra.view(), &rng, Some(base.view())).unwrap();
        assert!(st.conditional);
        let joint = concatenate(Axis(1), &[base.view(), extra.view()]).unwrap();
        let rv = ranks(&y).unwrap();
        let nj = nearest_neighbors(joint.view(), &rng.child(0)).unwrap();
        let nb = nearest_neighbors(base.view(), &rng.child(1)).unwrap();
        let diff = codec_q(&rv, &nj).unwrap() - codec_q(&rv, &nb).unwrap();
        assert_eq!(st.q_n, diff);
        assert_eq!(st.s_n, codec_s_conditional(&rv, &nb).unwrap());
        assert!(st.t_n_f64().unwrap() > 0.3);
    }

    proptest! {
        // In 1-D with distinct values, neighbour sets depend only on the
        // ordering of gaps, so x only gets affine increasing maps, with
        // integer coefficients to keep distance ties exact.
        #[test]
        fn invariant_under_increasing_maps(
            pairs in prop::collection::hash_map(-10_000i32..10_000, -10_000i32..10_000, 3..60),
            a in 1i32..10,
            b in -5i32..5,
        ) {
            let x: Vec<f64> = pairs.keys().map(|&k| f64::from(k)).collect();
            let y: Vec<f64> = pairs.values().map(|&v| f64::from(v)).collect();
            let rng = derive_rng(3, &[]);
            let t0 = codec_t(&y, col(&x).view(), &rng, None).unwrap();
            let y2: Vec<f64> = y.iter().map(|v| v.powi(3) + 2.0 * v).collect();
            let x2: Vec<f64> = x.iter().map(|v| f64::from(a) * v + f64::from(b)).collect();
            let t1 = codec_t(&y2, col(&x2).view(), &rng, None).unwrap();
            prop_assert_eq!(t0, t1);
        }

        #[test]
        fn t_is_ratio(y in prop::collection::vec(-20i32..20, 2..80), seed: u64) {
            let y: Vec<f64> = y.into_iter().map(f64::from).collect();
            let n = y.len();
            let x = Array2::from_shape_fn((n, 1), |(i, _)| ((i * 37) % 11) as f64);
            let st = codec_t(&y, x.view(), &derive_rng(seed, &[]), None).unwrap();
            if let Some(t) = st.t_n() {
                prop_assert_eq!(t * st.s_n, st.q_n);
            }
        }
    }

    #[test]
    fn exhaustive_and_tree_give_same_statistic() {
        let mut g = derive_rng(77, &[]).rng();
        let n = 2500;
        let x = Array2::from_shape_fn((n, 2), |_| g.gen_range(0..30) as f64);
        let y: Vec<f64> = (0..n).map(|i| x[[i, 0]] + g.gen::<f64>()).collect();
        let s = derive_rng(1, &[]);
        let rv = ranks(&y).unwrap();
        let a = crate::rankdep::nearest_neighbors_with(x.view(), &s, NeighborSearch::Exhaustive).unwrap();
        let b = crate::rankdep::nearest_neighbors_with(x.view(), &s, NeighborSearch::KdTree).unwrap();
        assert_eq!(codec_q(&rv, &a).unwrap(), codec_q(&rv, &b).unwrap());
    }
}
