//! Quantile aggregation of p-values from repeated sample splits with an
//! adaptive quantile level.

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_GAMMA_MIN: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregatedPValue {
    pub p0: f64,
    pub gamma_min: f64,
    pub per_split: Vec<f64>,
}

/// `p0 = min(1, (1 - ln γ_min) · inf_{γ ∈ [γ_min, 1]} Q(γ))` where `Q(γ)` is the
/// empirical γ-quantile of `p_b / γ`, capped at 1.
///
/// With the inverse-ECDF quantile, `Q(γ) = p_(k) / γ` on `γ ∈ ((k-1)/m, k/m]`,
/// so the infimum is attained at the right end of a step:
/// `min_{k ≥ ⌈γ_min m⌉} p_(k) · m / k`.
pub fn aggregate_pvalues(per_split: &[f64], gamma_min: f64) -> Result<AggregatedPValue> {
    if per_split.is_empty() {
        return Err(Error::InvalidArgument("no p-values to aggregate".into()));
    }
    if !(gamma_min > 0.0 && gamma_min < 1.0) {
        return Err(Error::InvalidArgument(format!("gamma_min {gamma_min} not in (0, 1)")));
    }
    if let Some(p) = per_split.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
        return Err(Error::InvalidArgument(format!("p-value {p} not in (0, 1]")));
    }
    let mut sorted = per_split.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let k_min = ((gamma_min * m as f64).ceil() as usize).max(1);
    let inf = (k_min..=m)
        .map(|k| (sorted[k - 1] * m as f64 / k as f64).min(1.0))
        .fold(f64::INFINITY, f64::min);
    Ok(AggregatedPValue {
        p0: ((1.0 - gamma_min.ln()) * inf).min(1.0),
        gamma_min,
        per_split: per_split.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::derive_rng;
    use proptest::prelude::*;
    use rand::Rng;

    /// Dense grid over γ with the quantile computed by counting.
    fn grid_oracle(p: &[f64], gamma_min: f64) -> f64 {
        let m = p.len();
        let mut sorted = p.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut best = f64::INFINITY;
        let steps = ((1.0 - gamma_min) / 1e-4).round() as usize;
        for s in 0..=steps {
            let g = gamma_min + s as f64 * 1e-4;
            // smallest order statistic whose ECDF reaches g
            let k = (1..=m).find(|&k| k as f64 / m as f64 >= g - 1e-12).unwrap();
            best = best.min((sorted[k - 1] / g).min(1.0));
        }
        ((1.0 - gamma_min.ln()) * best).min(1.0)
    }

    #[test]
    fn all_ones() {
        assert_eq!(aggregate_pvalues(&[1.0; 50], 0.05).unwrap().p0, 1.0);
    }

    #[test]
    fn constant_small_values() {
        for c in [0.001, 0.01, 0.04] {
            let agg = aggregate_pvalues(&[c; 50], 0.05).unwrap();
            let expect = ((1.0 - 0.05f64.ln()) * c).min(1.0);
            assert!((agg.p0 - expect).abs() < 1e-12);
            assert!((agg.p0 - grid_oracle(&[c; 50], 0.05)).abs() < 1e-9);
        }
    }

    #[test]
    fn random_inputs_match_grid() {
        for seed in 0..100 {
            let mut g = derive_rng(seed, &[70]).rng();
            let m = g.gen_range(1..=60);
            let p: Vec<f64> = (0..m).map(|_| g.gen_range(1e-6..=1.0f64).powi(3)).collect();
            let gmin = [0.05, 0.1, 0.2][seed as usize % 3];
            let exact = aggregate_pvalues(&p, gmin).unwrap().p0;
            let grid = grid_oracle(&p, gmin);
            assert!(exact <= grid + 1e-12);
            // grid spacing 1e-4 bounds the relative miss by 1e-4 / γ_min
            assert!(grid - exact <= 1e-4 / gmin * exact + 1e-12, "{exact} {grid}");
        }
    }

    #[test]
    fn invalid() {
        assert!(aggregate_pvalues(&[], 0.05).is_err());
        assert!(aggregate_pvalues(&[0.0], 0.05).is_err());
        assert!(aggregate_pvalues(&[0.5], 1.0).is_err());
        assert!(aggregate_pvalues(&[f64::NAN], 0.05).is_err());
    }

    #[test]
    fn valid_under_uniform() {
        let mut hits = 0;
        for seed in 0..500 {
            let mut g = derive_rng(seed, &[71]).rng();
            let p: Vec<f64> = (0..50).map(|_| 1.0 - g.gen::<f64>()).collect();
            hits += usize::from(aggregate_pvalues(&p, 0.05).unwrap().p0 <= 0.05);
        }
        assert!(hits as f64 / 500.0 <= 0.07, "{hits}");
    }

    proptest! {
        #[test]
        fn bounds_and_monotonicity(
            p in prop::collection::vec(1e-9f64..=1.0, 1..60),
            idx in any::<prop::sample::Index>(),
            bump in 0.0f64..1.0,
        ) {
            let a = aggregate_pvalues(&p, 0.05).unwrap();
            let min = p.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assert!(a.p0 <= 1.0);
            prop_assert!(a.p0 >= min);
            let mut q = p.clone();
            let i = idx.index(q.len());
            q[i] = (q[i] + bump).min(1.0);
            prop_assert!(aggregate_pvalues(&q, 0.05).unwrap().p0 >= a.p0);
        }
    }
}
