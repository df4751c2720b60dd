use crate::error::{Error, Result};

/// Sum of logs of the exact factors `(n - i) / (i + 1)`; each term carries
/// one rounding, which keeps the tail accurate to about 1e-14.
fn ln_choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

/// One-sided Fisher exact test that group 1 succeeds less often than group 2.
///
/// Both groups have `trials` draws. With margins fixed, the first cell is
/// hypergeometric (population `2·trials`, `k1 + k2` successes, `trials`
/// draws); the p-value is its lower tail at `k1`.
pub fn fisher_exact_less(k1: u64, k2: u64, trials: u64) -> Result<f64> {
    if k1 > trials || k2 > trials {
        return Err(Error::InvalidArgument(format!(
            "counts ({k1}, {k2}) exceed {trials} trials"
        )));
    }
    let pop = 2 * trials;
    let succ = k1 + k2;
    let lo = succ.saturating_sub(trials);
    let ln_total = ln_choose(pop, trials);
    let terms: Vec<f64> = (lo..=k1)
        .map(|x| ln_choose(succ, x) + ln_choose(pop - succ, trials - x) - ln_total)
        .collect();
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let p = max.exp() * terms.iter().map(|t| (t - max).exp()).sum::<f64>();
    Ok(p.min(1.0))
}
