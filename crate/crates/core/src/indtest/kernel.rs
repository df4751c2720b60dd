//! Gaussian Gram matrices with the median-distance bandwidth.

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Row-major copy of the points in one buffer.
struct Points {
    data: Vec<f64>,
    dim: usize,
}

impl Points {
    fn len(&self) -> usize {
        self.data.len() / self.dim.max(1)
    }
}

impl std::ops::Index<usize> for Points {
    type Output = [f64];
    #[inline]
    fn index(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

fn rows(v: ArrayView2<'_, f64>) -> Points {
    Points {
        data: v.iter().copied().collect(),
        dim: v.ncols(),
    }
}

/// Median of the nonzero pairwise Euclidean distances, or 1 if there are none.
pub fn median_bandwidth(v: ArrayView2<'_, f64>) -> f64 {
    if v.ncols() == 1 {
        return median_bandwidth_1d(&v.column(0).to_vec());
    }
    let pts = rows(v);
    // order statistics are taken on squared distances; sqrt is monotone
    if let Some(m) = bracketed_median(&pts) {
        return m;
    }
    let n = pts.len();
    let mut d: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let pts = &pts;
            (i + 1..n).map(move |l| sq_dist(&pts[i], &pts[l]))
        })
        .filter(|&d| d > 0.0)
        .collect();
    let ks = match median_ranks(d.len() as u64) {
        Some(ks) => ks,
        None => return 1.0,
    };
    let vals: Vec<f64> = ks
        .iter()
        .map(|&k| *d.select_nth_unstable_by(k as usize, f64::total_cmp).1)
        .collect();
    mean_sqrt(&vals)
}

fn median_ranks(m: u64) -> Option<Vec<u64>> {
    match m {
        0 => None,
        _ if m % 2 == 1 => Some(vec![m / 2]),
        _ => Some(vec![m / 2 - 1, m / 2]),
    }
}

fn mean_sqrt(v: &[f64]) -> f64 {
    v.iter().map(|d| d.sqrt()).sum::<f64>() / v.len() as f64
}

/// Exact median without holding every distance: a pilot from a few rows
/// brackets the middle, then one pass counts the pairs below the bracket and
/// keeps only those inside it. `None` when the bracket misses.
fn bracketed_median(pts: &Points) -> Option<f64> {
    let n = pts.len();
    if n < 400 {
        return None;
    }
    let mut pilot: Vec<f64> = (0..n)
        .step_by(n / 64)
        .flat_map(|i| (0..n).filter(move |&l| l != i).map(move |l| sq_dist(&pts[i], &pts[l])))
        .filter(|&d| d > 0.0)
        .collect();
    if pilot.is_empty() {
        return None;
    }
    pilot.sort_by(f64::total_cmp);
    let q = |f: f64| pilot[((f * pilot.len() as f64) as usize).min(pilot.len() - 1)];
    let (lo, hi) = (q(0.48), q(0.52));
    let parts: Vec<(u64, u64, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (mut zero, mut below) = (0u64, 0u64);
            let mut band = Vec::new();
            for l in i + 1..n {
                let d = sq_dist(&pts[i], &pts[l]);
                if d == 0.0 {
                    zero += 1;
                } else if d < lo {
                    below += 1;
                } else if d <= hi {
                    band.push(d);
                }
            }
            (zero, below, band)
        })
        .collect();
    let zero: u64 = parts.iter().map(|p| p.0).sum();
    let below: u64 = parts.iter().map(|p| p.1).sum();
    let mut band: Vec<f64> = parts.into_iter().flat_map(|p| p.2).collect();
    let total = (n as u64) * (n as u64 - 1) / 2;
    let ks = median_ranks(total - zero)?;
    let mut vals = Vec::new();
    for k in ks {
        let k = usize::try_from(k.checked_sub(below)?)
            .ok()
            .filter(|&k| k < band.len())?;
        vals.push(*band.select_nth_unstable_by(k, f64::total_cmp).1);
    }
    Some(mean_sqrt(&vals))
}

/// Same value as the generic path in `O(n log n)`: on sorted data the number
/// of pairs within distance `t` is a two-pointer count, and order statistics
/// of the distances are found by bisection over the bit patterns of `t`.
fn median_bandwidth_1d(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    let within = |t: f64| -> u64 {
        let mut j = 0;
        let mut c = 0u64;
        for i in 0..n {
            j = j.max(i);
            while j + 1 < n && s[j + 1] - s[i] <= t {
                j += 1;
            }
            c += (j - i) as u64;
        }
        c
    };
    let zero = within(0.0);
    let total = (n as u64) * (n as u64).saturating_sub(1) / 2;
    let m = total - zero;
    if m == 0 {
        return 1.0;
    }
    // k-th smallest nonzero distance, 0-based
    let kth = |k: u64| {
        let (mut lo, mut hi) = (0u64, (s[n - 1] - s[0]).to_bits());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if within(f64::from_bits(mid)) - zero > k {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        f64::from_bits(lo)
    };
    let hi = kth(m / 2);
    if m % 2 == 1 {
        hi
    } else {
        (kth(m / 2 - 1) + hi) / 2.0
    }
}

/// `K_il = exp(-|v_i - v_l|² / (2σ²))` with the median-heuristic σ.
pub fn gaussian_gram(v: ArrayView2<'_, f64>) -> Array2<f64> {
    let sigma = median_bandwidth(v);
    let pts = rows(v);
    let scale = 1.0 / (2.0 * sigma * sigma);
    Array2::from_shape_fn((pts.len(), pts.len()), |(i, l)| {
        (-sq_dist(&pts[i], &pts[l]) * scale).exp()
    })
}

/// Dense Gram matrix in single precision; kernel values lie in (0, 1], so
/// the relative error of the stored entries is about 6e-8 while memory halves.
pub(crate) struct GramF32 {
    pub n: usize,
    pub data: Vec<f32>,
    /// Row means of the uncentred kernel, filled by `center` or
    /// `compute_row_means`.
    pub row_means: Vec<f64>,
}

impl GramF32 {
    pub fn new(v: ArrayView2<'_, f64>, sigma: f64) -> Self {
        let pts = rows(v);
        let n = pts.len();
        let scale = 1.0 / (2.0 * sigma * sigma);
        let mut data = vec![0f32; n * n];
        // upper triangle first, then mirror
        data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for l in i..n {
                row[l] = ((-sq_dist(&pts[i], &pts[l]) * scale) as f32).exp();
            }
        });
        const TILE: usize = 64;
        for bi in (0..n).step_by(TILE) {
            for bl in (0..=bi).step_by(TILE) {
                for i in bi..(bi + TILE).min(n) {
                    for l in bl..(bl + TILE).min(i) {
                        data[i * n + l] = data[l * n + i];
                    }
                }
            }
        }
        Self {
            n,
            data,
            row_means: Vec::new(),
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Row means of the current entries, summed in f64.
    pub fn compute_row_means(&mut self) -> &[f64] {
        let n = self.n;
        self.row_means = self
            .data
            .par_chunks(n)
            .map(|r| r.iter().map(|&v| f64::from(v)).sum::<f64>() / n as f64)
            .collect();
        &self.row_means
    }

    /// Double centring `HKH` in place; the raw row means stay available.
    pub fn center(&mut self) {
        let n = self.n;
        self.compute_row_means();
        let means = &self.row_means;
        let grand = means.iter().sum::<f64>() / n as f64;
        // the kernel is symmetric, so column means equal row means
        self.data.par_chunks_mut(n).enumerate().for_each(|(i, r)| {
            for (l, v) in r.iter_mut().enumerate() {
                *v = (f64::from(*v) - means[i] - means[l] + grand) as f32;
            }
        });
    }
}
