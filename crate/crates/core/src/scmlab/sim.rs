//! Repeated simulate-then-analyse experiments.

use std::io::Write;

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use super::metrics::{amp, fpr_tpr_sets, Rates};
use super::spec::{Sample, ScmSpec};
use super::suites::{fig2_subsets, fig2_suite, lsnm_population_residual, lsnm_suite, LsnmParams, FIG2_PREDICTORS};
use super::truth::{ground_truth_w, GroundTruth};
use crate::error::{Error, Result};
use crate::regress::Mode;
use crate::tabular::{make_split, RngStream};
use crate::wellspec::{alg3_multisplit, heldout_residuals, AnalysisConfig};

#[derive(Clone, Debug, PartialEq)]
pub enum Suite {
    Fig2,
    Lsnm,
    Custom(Box<ScmSpec>),
}

impl Suite {
    /// Parse `fig2`, `lsnm` or `custom:<path to spec json>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Suite::Fig2),
            "lsnm" => Ok(Suite::Lsnm),
            _ => match s.strip_prefix("custom:") {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                        path: path.into(),
                        source,
                    })?;
                    Ok(Suite::Custom(Box::new(ScmSpec::from_json(&text)?)))
                }
                None => Err(Error::InvalidArgument(format!(
                    "unknown suite '{s}' (expected fig2, lsnm or custom:<file>)"
                ))),
            },
        }
    }

    pub fn default_mode(&self) -> Mode {
        match self {
            Suite::Lsnm => Mode::Lsnm,
            _ => Mode::Anm,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimRow {
    pub run: usize,
    pub observed: Vec<String>,
    pub p0: f64,
    pub w_hat: Vec<bool>,
    pub truth: GroundTruth,
    /// Location-scale mode only.
    pub amp: Option<f64>,
    pub fallback_rows: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimOutput {
    pub rows: Vec<SimRow>,
    pub rates: Rates,
}

fn seed_of(stream: &RngStream) -> u64 {
    stream.rng().next_u64()
}

/// Observed subsets evaluated for each run, as names.
fn subsets(suite: &Suite, spec: &ScmSpec) -> Vec<Vec<String>> {
    match suite {
        Suite::Fig2 => fig2_subsets()
            .iter()
            .map(|s| s.iter().map(|&k| FIG2_PREDICTORS[k].to_string()).collect())
            .collect(),
        _ => vec![spec.observed.clone()],
    }
}

/// Population residuals on `rows` when the suite has an oracle for them.
fn true_residuals(suite: &Suite, sample: &Sample, observed: &[String], rows: &[usize]) -> Option<Vec<f64>> {
    match suite {
        Suite::Lsnm if observed == ["X1", "X2"] => {
            let x1 = sample.data.column(0);
            let h = &sample.hidden.iter().find(|(n, _)| n == "H")?.1;
            let sel = |v: &[f64]| rows.iter().map(|&i| v[i]).collect::<Vec<_>>();
            Some(lsnm_population_residual(&LsnmParams::default(), &sel(&x1), &sel(h)))
        }
        Suite::Lsnm => None,
        _ => Some(rows.iter().map(|&i| sample.eps_true[i]).collect()),
    }
}

/// Run `runs` independent replicates of `suite` at sample size `n`.
///
/// Replicate `r` draws its model from stream `[0, r]` and its data from
/// `[1, r]` under `seed`; observed subset `k` is analysed with the master
/// seed drawn from `[2, r, k]`. Output is ordered by (run, subset).
pub fn simulate(suite: &Suite, n: usize, runs: usize, seed: u64, analysis: &AnalysisConfig) -> Result<SimOutput> {
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be at least 1".into()));
    }
    analysis.validate()?;
    let root = RngStream::new(seed);
    let draws = (0..runs)
        .into_par_iter()
        .map(|r| {
            let spec = match suite {
                Suite::Fig2 => fig2_suite(seed_of(&root.descend(&[0, r as u64])))?,
                Suite::Lsnm => lsnm_suite(),
                Suite::Custom(s) => (**s).clone(),
            };
            let mut full = spec.clone();
            full.observed = match suite {
                Suite::Fig2 => FIG2_PREDICTORS.iter().map(|s| s.to_string()).collect(),
                _ => spec.observed.clone(),
            };
            let sample = full.sample(n, &root.descend(&[1, r as u64]))?;
            Ok((spec, sample))
        })
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize, Vec<String>)> = draws
        .iter()
        .enumerate()
        .flat_map(|(r, (spec, _))| {
            subsets(suite, spec)
                .into_iter()
                .enumerate()
                .map(move |(k, obs)| (r, k, obs))
        })
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(r, k, obs)| {
            let (spec, sample) = &draws[r];
            let names: Vec<&str> = obs.iter().map(String::as_str).collect();
            let sub_spec = spec.with_observed(&names)?;
            let truth = ground_truth_w(&sub_spec)?;
            let cols = obs
                .iter()
                .map(|o| sample.data.column_index(o).ok_or_else(|| Error::UnknownNode(o.clone())))
                .collect::<Result<Vec<_>>>()?;
            let ds = sample.data.select_columns(&cols)?;
            let mut cfg = analysis.clone();
            cfg.master_seed = seed_of(&root.descend(&[2, r as u64, k as u64]));
            let report = alg3_multisplit(&ds, &cfg, false)?;
            let amp_value = if cfg.mode == Mode::Lsnm {
                let plan = make_split(ds.n(), cfg.master_seed, 0)?;
                let (fit_idx, eval_idx) = plan.halves(false);
                match true_residuals(suite, sample, &obs, eval_idx) {
                    Some(truth_eps) => {
                        let (res, _) = heldout_residuals(&ds, &cfg, fit_idx, eval_idx)?;
                        Some(amp(&truth_eps, &res.eps_hat)?)
                    }
                    None => None,
                }
            } else {
                None
            };
            Ok(SimRow {
                run: r,
                observed: obs,
                p0: report.p0,
                w_hat: (0..ds.p()).map(|j| report.contains(j)).collect(),
                truth,
                amp: amp_value,
                fallback_rows: report.fallback_rows,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let scored: Vec<(Vec<usize>, GroundTruth)> = rows
        .iter()
        .map(|row| {
            let sel = row
                .w_hat
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(j, _)| j)
                .collect();
            (sel, row.truth.clone())
        })
        .collect();
    let rates = fpr_tpr_sets(&scored)?;
    Ok(SimOutput { rows, rates })
}

const HEADER: [&str; 13] = [
    "run",
    "observed",
    "p0",
    "w_hat",
    "w_true",
    "w_hat_flags",
    "w_true_flags",
    "global_ok",
    "amp",
    "fallback_rows",
    "fpr",
    "tpr",
    "denominators",
];

fn flags(v: impl Iterator<Item = bool>) -> String {
    v.map(|b| if b { '1' } else { '0' }).collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

/// One row per (run, observed subset) followed by a `summary` row.
pub fn write_csv<W: Write>(out: &SimOutput, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER)?;
    for row in &out.rows {
        let picked: Vec<&str> = row
            .observed
            .iter()
            .zip(&row.w_hat)
            .filter(|(_, &b)| b)
            .map(|(n, _)| n.as_str())
            .collect();
        w.write_record([
            row.run.to_string(),
            row.observed.join(";"),
            format!("{:?}", row.p0),
            picked.join(";"),
            row.truth.w_true_names.join(";"),
            flags(row.w_hat.iter().copied()),
            flags((0..row.truth.n_observed).map(|j| row.truth.w_true.contains(&j))),
            row.truth.global_ok.to_string(),
            opt(row.amp),
            row.fallback_rows.to_string(),
            String::new(),
            String::new(),
            String::new(),
        ])?;
    }
    let r = &out.rates;
    let mut summary = vec![String::new(); HEADER.len()];
    summary[0] = "summary".into();
    summary[10] = opt(r.fpr);
    summary[11] = opt(r.tpr);
    summary[12] = format!("{}/{}", r.negatives, r.positives);
    w.write_record(&summary)?;
    w.flush().map_err(|e| Error::Internal(e.to_string()))?;
    Ok(())
}
