use serde::Serialize;

use crate::error::{Error, Result};
use crate::indtest::fisher_exact_less;

/// Outcome of the count-based selection step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Selection {
    pub n_bar: f64,
    /// Smallest count among variables at or above the mean.
    pub n_min: usize,
    /// One-sided proportion-test p-value for every variable below the mean.
    pub proportion_pvalues: Vec<Option<f64>>,
    /// Selected indices, ascending.
    pub w_hat: Vec<usize>,
    /// Whether the global test rejected (`p0 <= alpha`).
    pub global_rejected: bool,
}

/// Split variables at the mean count and keep those selected significantly
/// less often than the least-selected variable of the upper group.
///
/// If the global test does not reject, every variable is kept. The mean
/// comparison is done in integers (`p · n_j < Σ n`), so it is exact.
pub fn select_well_specified(
    counts: &[usize],
    two_b: usize,
    p0: f64,
    alpha: f64,
    alpha_tilde: f64,
) -> Result<Selection> {
    if counts.is_empty() {
        return Err(Error::NoPredictors);
    }
    if let Some(c) = counts.iter().find(|&&c| c > two_b) {
        return Err(Error::InvalidArgument(format!("count {c} exceeds {two_b} runs")));
    }
    let p = counts.len();
    let total: usize = counts.iter().sum();
    let below = |c: usize| p * c < total;
    let n_min = counts
        .iter()
        .copied()
        .filter(|&c| !below(c))
        .min()
        .ok_or_else(|| Error::Internal("no count reaches the mean".into()))?;
    let proportion_pvalues = counts
        .iter()
        .map(|&c| {
            if below(c) {
                fisher_exact_less(c as u64, n_min as u64, two_b as u64).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let global_rejected = p0 <= alpha;
    let w_hat = if global_rejected {
        proportion_pvalues
            .iter()
            .enumerate()
            .filter(|(_, pv)| pv.is_some_and(|v| v <= alpha_tilde))
            .map(|(j, _)| j)
            .collect()
    } else {
        (0..p).collect()
    };
    Ok(Selection {
        n_bar: total as f64 / p as f64,
        n_min,
        proportion_pvalues,
        w_hat,
        global_rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn table_counts() {
        let s = select_well_specified(&[22, 19, 41], 50, 0.001, 0.05, 0.01).unwrap();
        assert!((s.n_bar - 82.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.n_min, 41);
        assert_eq!(s.w_hat, vec![0, 1]);
        assert!(s.proportion_pvalues[2].is_none());
    }

    #[test]
    fn global_acceptance_keeps_all() {
        let s = select_well_specified(&[0, 50, 3], 50, 0.5, 0.05, 0.01).unwrap();
        assert_eq!(s.w_hat, vec![0, 1, 2]);
        assert!(!s.global_rejected);
    }

    #[test]
    fn equal_counts_select_nothing() {
        let s = select_well_specified(&[7, 7, 7, 7], 50, 0.0, 0.05, 0.01).unwrap();
        assert!(s.w_hat.is_empty());
        assert_eq!(s.n_min, 7);
    }

    #[test]
    fn invalid_counts() {
        assert!(select_well_specified(&[51], 50, 0.0, 0.05, 0.01).is_err());
        assert!(select_well_specified(&[], 50, 0.0, 0.05, 0.01).is_err());
    }

    proptest! {
        #[test]
        fn structural_invariants(
            counts in prop::collection::vec(0usize..=50, 1..12),
            p0 in 0.0f64..1.0,
            alpha in 0.001f64..0.5,
            a1 in 0.0001f64..0.2,
            a2 in 0.0001f64..0.2,
        ) {
            let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
            let s_lo = select_well_specified(&counts, 50, p0, alpha, lo).unwrap();
            let s_hi = select_well_specified(&counts, 50, p0, alpha, hi).unwrap();
            let total: usize = counts.iter().sum();
            prop_assert!((s_lo.n_bar * counts.len() as f64 - total as f64).abs() < 1e-9);
            if p0 > alpha {
                prop_assert_eq!(s_lo.w_hat.len(), counts.len());
            } else {
                for &j in &s_lo.w_hat {
                    prop_assert!(counts.len() * counts[j] < total);
                    prop_assert!(s_hi.w_hat.contains(&j));
                }
            }
            // lowering alpha can only move to the keep-everything regime
            let s_strict = select_well_specified(&counts, 50, p0, alpha / 2.0, lo).unwrap();
            if s_strict.w_hat != s_lo.w_hat {
                prop_assert_eq!(s_strict.w_hat.len(), counts.len());
            }
        }
    }
}
