use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

/// Brute-force k-nearest-neighbour mean regression.
#[derive(Clone, Debug, PartialEq)]
pub struct KnnModel {
    k: usize,
    x: Array2<f64>,
    y: Vec<f64>,
}

impl KnnModel {
    pub(crate) fn fit(k: usize, x: ArrayView2<'_, f64>, y: &[f64]) -> Self {
        Self {
            k: k.min(y.len()),
            x: x.as_standard_layout().into_owned(),
            y: y.to_vec(),
        }
    }

    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Vec<f64> {
        let rows: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
        rows.par_iter().map(|r| self.predict_row(r)).collect()
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut d: Vec<(f64, usize)> = self
            .x
            .rows()
            .into_iter()
            .enumerate()
            .map(|(i, t)| (t.iter().zip(row).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        // distance, then training index, so ties are deterministic
        d.select_nth_unstable_by(self.k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        d[..self.k].iter().map(|&(_, i)| self.y[i]).sum::<f64>() / self.k as f64
    }
}
