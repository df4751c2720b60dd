//! Greedy forward selection on the rank dependence coefficient.

use ndarray::{Array2, ArrayView2, Axis};
use rayon::prelude::*;
use serde::Serialize;

use super::codec::{codec_q, codec_s_unconditional, to_f64, Rational};
use super::neighbors::{nearest_neighbors_with, NeighborSearch};
use super::ranks::ranks;
use crate::error::{Error, Result};
use crate::tabular::RngStream;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FociOptions {
    /// Scale every column to unit standard deviation before neighbour search.
    pub standardize: bool,
    pub search: NeighborSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FociResult {
    /// Selected column indices in order of selection (0-based).
    pub selected: Vec<usize>,
    /// Set when the response is constant and the coefficient is undefined.
    pub undefined: bool,
    /// Coefficient of the selected prefix after each accepted step.
    pub t_path: Vec<f64>,
}

pub fn foci_select(y: &[f64], x: ArrayView2<'_, f64>, rng: &RngStream) -> Result<FociResult> {
    foci_select_with(y, x, rng, &FociOptions::default())
}

fn standardized(x: ArrayView2<'_, f64>) -> Array2<f64> {
    let mut out = x.to_owned();
    for mut col in out.axis_iter_mut(Axis(1)) {
        let n = col.len() as f64;
        let mean = col.sum() / n;
        let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        if sd > 0.0 {
            col.mapv_inplace(|v| v / sd);
        }
    }
    out
}

/// Forward selection of predictors for `y`.
///
/// Each step adds the column that maximises the coefficient of `y` on the
/// enlarged set and stops as soon as that does not beat the current set (the
/// empty set scores 0). The candidate `j` at step `k` draws neighbour ties
/// from `rng.descend(&[k, j])`.
pub fn foci_select_with(y: &[f64], x: ArrayView2<'_, f64>, rng: &RngStream, opts: &FociOptions) -> Result<FociResult> {
    let (n, p) = x.dim();
    if n != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} responses, {n} predictor rows",
            y.len()
        )));
    }
    if n < 2 {
        return Err(Error::TooFewRows { n, min: 2 });
    }
    if p == 0 {
        return Err(Error::NoPredictors);
    }
    let rv = ranks(y)?;
    let s_n = codec_s_unconditional(&rv);
    let zero = Rational::from_integer(0);
    if s_n == zero {
        log::warn!("constant response: dependence coefficient undefined, selecting nothing");
        return Ok(FociResult {
            selected: Vec::new(),
            undefined: true,
            t_path: Vec::new(),
        });
    }
    let owned;
    let x = if opts.standardize {
        owned = standardized(x);
        owned.view()
    } else {
        x.view()
    };

    let mut selected: Vec<usize> = Vec::new();
    let mut current = zero;
    let mut t_path = Vec::new();
    for step in 0..p {
        let candidates: Vec<usize> = (0..p).filter(|j| !selected.contains(j)).collect();
        let scores = candidates
            .par_iter()
            .map(|&j| {
                let mut cols = selected.clone();
                cols.push(j);
                let sub = x.select(Axis(1), &cols);
                let nn = nearest_neighbors_with(sub.view(), &rng.descend(&[step as u64, j as u64]), opts.search)?;
                codec_q(&rv, &nn)
            })
            .collect::<Result<Vec<_>>>()?;
        // first maximum in index order
        let mut best = 0;
        for k in 1..scores.len() {
            if scores[k] > scores[best] {
                best = k;
            }
        }
        if scores[best] <= current {
            break;
        }
        current = scores[best];
        selected.push(candidates[best]);
        t_path.push(to_f64(&(current / s_n)));
    }
    Ok(FociResult {
        selected,
        undefined: false,
        t_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::derive_rng;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    /// Literal re-implementation: recompute every candidate coefficient from
    /// the defining sums with the same tie streams.
    fn brute_foci(y: &[f64], x: &Array2<f64>, rng: &RngStream) -> Vec<usize> {
        let (n, p) = x.dim();
        let nf = n as f64;
        let r: Vec<f64> = y.iter().map(|a| y.iter().filter(|b| *b <= a).count() as f64).collect();
        let l: Vec<f64> = y.iter().map(|a| y.iter().filter(|b| *b >= a).count() as f64).collect();
        let s: f64 = l.iter().map(|li| li * (nf - li)).sum::<f64>() / nf.powi(3);
        let mut sel: Vec<usize> = Vec::new();
        let mut cur = 0.0;
        for step in 0..p {
            let mut best: Option<(usize, f64)> = None;
            for j in (0..p).filter(|j| !sel.contains(j)) {
                let mut cols = sel.clone();
                cols.push(j);
                let sub = x.select(Axis(1), &cols);
                let nn = nearest_neighbors_with(
                    sub.view(),
                    &rng.descend(&[step as u64, j as u64]),
                    NeighborSearch::Exhaustive,
                )
                .unwrap();
                let q: f64 = (0..n).map(|i| r[i].min(r[nn.m[i]]) - l[i] * l[i] / nf).sum::<f64>() / (nf * nf);
                let t = q / s;
                if best.is_none_or(|(_, bt)| t > bt + 1e-12) {
                    best = Some((j, t));
                }
            }
            match best {
                Some((j, t)) if t > cur + 1e-12 => {
                    sel.push(j);
                    cur = t;
                }
                _ => break,
            }
        }
        sel
    }

    #[test]
    fn matches_brute_force_on_small_problems() {
        for seed in 0..150 {
            let mut g = derive_rng(seed, &[50]).rng();
            let n = g.gen_range(5..=50);
            let p = g.gen_range(1..=4);
            let x = Array2::from_shape_fn((n, p), |_| g.gen_range(0..6) as f64);
            let y: Vec<f64> = (0..n)
                .map(|i| x[[i, 0]] * if p > 1 { x[[i, p - 1]] } else { 1.0 } + g.gen_range(0..3) as f64)
                .collect();
            let rng = derive_rng(seed, &[51]);
            let fast = foci_select(&y, x.view(), &rng).unwrap();
            assert_eq!(fast.selected, brute_foci(&y, &x, &rng), "seed {seed}");
        }
    }

    #[test]
    fn recovers_exact_copy() {
        let mut hits = 0;
        for seed in 0..100 {
            let mut g = derive_rng(seed, &[52]).rng();
            let x = Array2::from_shape_fn((1000, 3), |_| StandardNormal.sample(&mut g));
            let y = x.column(0).to_vec();
            let res = foci_select(&y, x.view(), &derive_rng(seed, &[53])).unwrap();
            hits += usize::from(res.selected == [0]);
        }
        assert!(hits >= 95, "{hits}");
    }

    /// Under independence each first-step coefficient is centred near zero,
    /// so an empty selection happens with probability close to 2^-p.
    #[test]
    fn independent_response_empty_rate() {
        for (p, lo, hi) in [(1usize, 0.4, 0.65), (3, 0.05, 0.22)] {
            let mut empty = 0;
            for seed in 0..100 {
                let mut g = derive_rng(seed, &[54, p as u64]).rng();
                let x = Array2::from_shape_fn((1000, p), |_| StandardNormal.sample(&mut g));
                let y: Vec<f64> = (0..1000).map(|_| StandardNormal.sample(&mut g)).collect();
                let res = foci_select(&y, x.view(), &derive_rng(seed, &[55])).unwrap();
                empty += usize::from(res.selected.is_empty());
            }
            let f = empty as f64 / 100.0;
            assert!(f >= lo && f <= hi, "p={p}: {f}");
        }
    }

    #[test]
    fn constant_response_is_flagged() {
        let x = Array2::from_shape_fn((10, 2), |(i, j)| (i * (j + 1)) as f64);
        let res = foci_select(&[1.0; 10], x.view(), &derive_rng(0, &[])).unwrap();
        assert!(res.undefined);
        assert!(res.selected.is_empty());
    }

    #[test]
    fn reproducible() {
        let mut g = derive_rng(9, &[]).rng();
        let x = Array2::from_shape_fn((300, 4), |_| g.gen_range(0..4) as f64);
        let y: Vec<f64> = (0..300).map(|i| x[[i, 1]] + x[[i, 2]]).collect();
        let a = foci_select(&y, x.view(), &derive_rng(9, &[1])).unwrap();
        let b = foci_select(&y, x.view(), &derive_rng(9, &[1])).unwrap();
        assert_eq!(a, b);
        assert!(a.selected.contains(&1) && a.selected.contains(&2));
    }

    #[test]
    fn standardize_changes_only_scale() {
        let mut g = derive_rng(10, &[]).rng();
        let x = Array2::from_shape_fn((200, 2), |(_, j)| g.gen::<f64>() * if j == 0 { 1000.0 } else { 1.0 });
        let y: Vec<f64> = (0..200).map(|i| x[[i, 1]]).collect();
        let opts = FociOptions {
            standardize: true,
            ..Default::default()
        };
        let res = foci_select_with(&y, x.view(), &derive_rng(1, &[]), &opts).unwrap();
        assert_eq!(res.selected.first(), Some(&1));
    }
}
