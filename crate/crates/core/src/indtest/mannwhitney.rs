use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Pooled samples at or below this size use the exact permutation law.
pub const EXACT_MAX_TOTAL: usize = 20;

/// Midranks of the pooled sample, doubled so they are integers.
fn doubled_midranks(pooled: &[f64]) -> (Vec<u64>, Vec<usize>) {
    let n = pooled.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0u64; n];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pooled[order[end]] == pooled[order[start]] {
            end += 1;
        }
        // ranks start+1..=end, mean (start + 1 + end) / 2
        for &i in &order[start..end] {
            ranks[i] = (start + 1 + end) as u64;
        }
        ties.push(end - start);
        start = end;
    }
    (ranks, ties)
}

/// Two-sided Mann-Whitney U test.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    if let Some(i) = a.iter().chain(b).position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = doubled_midranks(&pooled);
    let (n1, n2) = (a.len(), b.len());
    let n = n1 + n2;
    let w2: u64 = ranks[..n1].iter().sum();
    if n <= EXACT_MAX_TOTAL {
        return Ok(exact_p(&ranks, n1, w2));
    }
    let (n1f, n2f, nf) = (n1 as f64, n2 as f64, n as f64);
    let u = w2 as f64 / 2.0 - n1f * (n1f + 1.0) / 2.0;
    let mean = n1f * n2f / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t as f64).powi(3) - t as f64).sum::<f64>() / (nf * (nf - 1.0));
    let var = n1f * n2f / 12.0 * ((nf + 1.0) - tie_term);
    if var <= 0.0 {
        return Ok(1.0);
    }
    let z = ((u - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok((2.0 * normal.sf(z)).min(1.0))
}

/// `P(|W - E W| >= |w - E W|)` over all equally likely assignments of the
/// pooled (doubled) midranks to the first sample.
fn exact_p(ranks: &[u64], n1: usize, w_obs: u64) -> f64 {
    let max_sum: u64 = ranks.iter().sum();
    let width = max_sum as usize + 1;
    // counts[k][s]: subsets of size k with doubled rank sum s
    let mut counts = vec![vec![0f64; width]; n1 + 1];
    counts[0][0] = 1.0;
    for &r in ranks {
        for k in (1..=n1).rev() {
            let (lo, hi) = counts.split_at_mut(k);
            for s in (r as usize..width).rev() {
                hi[0][s] += lo[k - 1][s - r as usize];
            }
        }
    }
    let n = ranks.len() as i64;
    // doubled expectation n1 (n + 1)
    let e2 = n1 as i64 * (n + 1);
    let dev = (w_obs as i64 - e2).abs();
    let total: f64 = counts[n1].iter().sum();
    let extreme: f64 = counts[n1]
        .iter()
        .enumerate()
        .filter(|(s, _)| (*s as i64 - e2).abs() >= dev)
        .map(|(_, c)| c)
        .sum();
    extreme / total
}
