//! Hilbert-Schmidt independence criterion between a residual vector and the
//! joint predictor vector, calibrated by permutation or a gamma fit.

use ndarray::{ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Gamma};

use super::kernel::{median_bandwidth, GramF32};
use crate::error::{Error, Result};
use crate::tabular::RngStream;

pub const DEFAULT_PERMUTATIONS: usize = 500;
pub const MIN_PERMUTATIONS: usize = 19;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum HsicMethod {
    Permutation,
    Gamma,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HsicResult {
    /// Biased estimate `trace(K H L H) / n²`.
    pub statistic: f64,
    pub p_value: f64,
    /// Zero for the gamma approximation.
    pub n_permutations: usize,
    pub bandwidth_eps: f64,
    pub bandwidth_x: f64,
    pub method: HsicMethod,
}

struct Prepared {
    n: usize,
    kc: GramF32,
    l: GramF32,
    sigma_eps: f64,
    sigma_x: f64,
}

fn prepare(eps: &[f64], x: ArrayView2<'_, f64>) -> Result<Prepared> {
    let n = eps.len();
    if x.nrows() != n {
        return Err(Error::ShapeMismatch(format!(
            "{n} residuals, {} predictor rows",
            x.nrows()
        )));
    }
    if n < 4 {
        return Err(Error::TooFewRows { n, min: 4 });
    }
    if let Some(i) = eps.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let e = ArrayView1::from(eps).insert_axis(Axis(1));
    let sigma_eps = median_bandwidth(e);
    let sigma_x = median_bandwidth(x);
    let mut kc = GramF32::new(x, sigma_x);
    kc.center();
    let l = GramF32::new(e, sigma_eps);
    Ok(Prepared {
        n,
        kc,
        l,
        sigma_eps,
        sigma_x,
    })
}

impl Prepared {
    /// `Σ_ij Kc[π_i, π_j] L_ij`; centring one factor is enough. Row sums are
    /// added in row order so the result does not depend on the thread count.
    fn permuted_sum(&self, perm: Option<&[usize]>) -> f64 {
        let n = self.n;
        (0..n)
            .into_par_iter()
            .map(|i| {
                let lrow = self.l.row(i);
                match perm {
                    None => {
                        let krow = self.kc.row(i);
                        krow.iter()
                            .zip(lrow)
                            .map(|(&k, &l)| f64::from(k) * f64::from(l))
                            .sum::<f64>()
                    }
                    Some(p) => {
                        let krow = self.kc.row(p[i]);
                        p.iter()
                            .zip(lrow)
                            .map(|(&pj, &l)| f64::from(krow[pj]) * f64::from(l))
                            .sum::<f64>()
                    }
                }
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum()
    }

    fn statistic(&self) -> f64 {
        (self.permuted_sum(None) / (self.n * self.n) as f64).max(0.0)
    }
}

pub fn hsic_stat(eps: &[f64], x: ArrayView2<'_, f64>) -> Result<f64> {
    Ok(prepare(eps, x)?.statistic())
}

/// Permutation test; only the residuals are permuted, each permutation from
/// its own sub-stream `rng.child(k)`.
pub fn hsic_perm_test(eps: &[f64], x: ArrayView2<'_, f64>, n_perm: usize, rng: &RngStream) -> Result<HsicResult> {
    if n_perm < MIN_PERMUTATIONS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_PERMUTATIONS} permutations, got {n_perm}"
        )));
    }
    let prep = prepare(eps, x)?;
    let observed = prep.permuted_sum(None);
    // sums that agree to rounding count as ties, which only makes p larger
    let threshold = observed - 1e-9 * observed.abs();
    let exceed = (0..n_perm)
        .map(|k| {
            let mut perm: Vec<usize> = (0..prep.n).collect();
            perm.shuffle(&mut rng.child(k as u64).rng());
            usize::from(prep.permuted_sum(Some(&perm)) >= threshold)
        })
        .sum::<usize>();
    Ok(HsicResult {
        statistic: (observed / (prep.n * prep.n) as f64).max(0.0),
        p_value: (1 + exceed) as f64 / (n_perm + 1) as f64,
        n_permutations: n_perm,
        bandwidth_eps: prep.sigma_eps,
        bandwidth_x: prep.sigma_x,
        method: HsicMethod::Permutation,
    })
}

/// Gamma approximation to the null law of `n · HSIC` from the first two
/// moments of the biased statistic.
pub fn hsic_gamma_test(eps: &[f64], x: ArrayView2<'_, f64>) -> Result<HsicResult> {
    let mut prep = prepare(eps, x)?;
    let n = prep.n;
    let nf = n as f64;
    // raw kernels have a unit diagonal
    let off_mean = |means: &[f64]| (means.iter().sum::<f64>() * nf - nf) / (nf * (nf - 1.0));
    let mu_x = off_mean(&prep.kc.row_means);
    prep.l.center();
    let mu_eps = off_mean(&prep.l.row_means);
    let (sum_kl, sum_kl2_off) = (0..n)
        .into_par_iter()
        .map(|i| {
            let (kr, lr) = (prep.kc.row(i), prep.l.row(i));
            let mut s = 0.0;
            let mut s2 = 0.0;
            for l in 0..n {
                let v = f64::from(kr[l]) * f64::from(lr[l]);
                s += v;
                if l != i {
                    s2 += (v / 6.0) * (v / 6.0);
                }
            }
            (s, s2)
        })
        .collect::<Vec<_>>()
        .iter()
        .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let statistic = (sum_kl / (nf * nf)).max(0.0);
    let test_stat = sum_kl / nf;
    let var =
        72.0 * (nf - 4.0) * (nf - 5.0) / (nf * (nf - 1.0) * (nf - 2.0) * (nf - 3.0)) * sum_kl2_off / (nf * (nf - 1.0));
    let mean = (1.0 + mu_x * mu_eps - mu_x - mu_eps) / nf;
    let p_value = if var > 0.0 && mean > 0.0 && test_stat > 0.0 {
        let shape = mean * mean / var;
        let scale = var * nf / mean;
        let gamma = Gamma::new(shape, 1.0 / scale).map_err(|e| Error::Internal(e.to_string()))?;
        gamma.sf(test_stat).clamp(f64::MIN_POSITIVE, 1.0)
    } else {
        1.0
    };
    Ok(HsicResult {
        statistic,
        p_value,
        n_permutations: 0,
        bandwidth_eps: prep.sigma_eps,
        bandwidth_x: prep.sigma_x,
        method: HsicMethod::Gamma,
    })
}

pub fn hsic_test(
    eps: &[f64],
    x: ArrayView2<'_, f64>,
    method: HsicMethod,
    n_perm: usize,
    rng: &RngStream,
) -> Result<HsicResult> {
    match method {
        HsicMethod::Permutation => hsic_perm_test(eps, x, n_perm, rng),
        HsicMethod::Gamma => hsic_gamma_test(eps, x),
    }
}
