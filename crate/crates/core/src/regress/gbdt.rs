//! Squared-loss gradient boosting with depth-limited histogram trees.

use ndarray::ArrayView2;
use serde::Serialize;

use super::spec::BoostParams;

/// Per-feature split thresholds; a value goes left when `v <= threshold`.
#[derive(Clone, Debug, PartialEq)]
struct Binner {
    thresholds: Vec<Vec<f64>>,
}

impl Binner {
    fn fit(x: ArrayView2<'_, f64>, max_bins: usize) -> Self {
        let thresholds = x
            .columns()
            .into_iter()
            .map(|col| {
                let mut v = col.to_vec();
                v.sort_by(f64::total_cmp);
                v.dedup();
                if v.len() <= max_bins {
                    v.windows(2).map(|w| w[0] + (w[1] - w[0]) / 2.0).collect()
                } else {
                    let mut t: Vec<f64> = (1..max_bins)
                        .map(|b| {
                            let i = b * v.len() / max_bins;
                            v[i - 1] + (v[i] - v[i - 1]) / 2.0
                        })
                        .collect();
                    t.dedup();
                    t
                }
            })
            .collect();
        Self { thresholds }
    }

    #[inline]
    fn bin(&self, feature: usize, v: f64) -> u16 {
        self.thresholds[feature].partition_point(|&t| t < v) as u16
    }

    fn n_bins(&self, feature: usize) -> usize {
        self.thresholds[feature].len() + 1
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict_row(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[feature] <= threshold { left } else { right },
            }
        }
    }
}

struct Grower<'a> {
    binner: &'a Binner,
    /// Column-major bin codes.
    bins: &'a [Vec<u16>],
    params: &'a BoostParams,
}

impl Grower<'_> {
    fn grow(&self, residual: &[f64], rows: Vec<usize>) -> Tree {
        let mut tree = Tree { nodes: Vec::new() };
        self.node(&mut tree, residual, rows, 0);
        tree
    }

    fn node(&self, tree: &mut Tree, residual: &[f64], rows: Vec<usize>, depth: usize) -> usize {
        let id = tree.nodes.len();
        let sum: f64 = rows.iter().map(|&i| residual[i]).sum();
        let count = rows.len();
        tree.nodes
            .push(Node::Leaf(self.params.learning_rate * sum / count as f64));
        if depth >= self.params.max_depth || count < 2 * self.params.min_leaf {
            return id;
        }
        let Some((feature, bin)) = self.best_split(residual, &rows, sum) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&i| usize::from(self.bins[feature][i]) <= bin);
        let left = self.node(tree, residual, l, depth + 1);
        let right = self.node(tree, residual, r, depth + 1);
        tree.nodes[id] = Node::Split {
            feature,
            threshold: self.binner.thresholds[feature][bin],
            left,
            right,
        };
        id
    }

    /// Largest reduction in squared error, ties to the lowest (feature, bin).
    fn best_split(&self, residual: &[f64], rows: &[usize], total: f64) -> Option<(usize, usize)> {
        let n = rows.len();
        let min_leaf = self.params.min_leaf;
        let parent = total * total / n as f64;
        let mut best: Option<(f64, usize, usize)> = None;
        for f in 0..self.bins.len() {
            let nb = self.binner.n_bins(f);
            if nb < 2 {
                continue;
            }
            let mut sums = vec![0.0; nb];
            let mut counts = vec![0usize; nb];
            for &i in rows {
                let b = usize::from(self.bins[f][i]);
                sums[b] += residual[i];
                counts[b] += 1;
            }
            let (mut sl, mut cl) = (0.0, 0usize);
            for b in 0..nb - 1 {
                sl += sums[b];
                cl += counts[b];
                if cl < min_leaf {
                    continue;
                }
                if n - cl < min_leaf {
                    break;
                }
                if counts[b] == 0 {
                    continue;
                }
                let sr = total - sl;
                let gain = sl * sl / cl as f64 + sr * sr / (n - cl) as f64 - parent;
                if gain > 1e-12 * (1.0 + parent.abs()) && best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, f, b));
                }
            }
        }
        best.map(|(_, f, b)| (f, b))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoostTrace {
    pub rounds_used: usize,
    pub train_mse: Vec<f64>,
    pub valid_mse: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoostedModel {
    base: f64,
    trees: Vec<Tree>,
    pub trace: BoostTrace,
}

fn mse(y: &[f64], f: &[f64]) -> f64 {
    y.iter().zip(f).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / y.len().max(1) as f64
}

impl BoostedModel {
    /// Caller guarantees consistent shapes and a non-empty training set.
    pub(crate) fn fit(
        params: &BoostParams,
        x: ArrayView2<'_, f64>,
        y: &[f64],
        x_valid: ArrayView2<'_, f64>,
        y_valid: &[f64],
    ) -> Self {
        let n = y.len();
        let binner = Binner::fit(x, params.max_bins);
        let bins: Vec<Vec<u16>> = (0..x.ncols())
            .map(|f| x.column(f).iter().map(|&v| binner.bin(f, v)).collect())
            .collect();
        let grower = Grower {
            binner: &binner,
            bins: &bins,
            params,
        };
        let base = y.iter().sum::<f64>() / n as f64;
        let mut f_train = vec![base; n];
        let mut f_valid = vec![base; y_valid.len()];
        let rows_valid: Vec<Vec<f64>> = x_valid.rows().into_iter().map(|r| r.to_vec()).collect();
        let rows_train: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
        let use_valid = !y_valid.is_empty();
        let mut trees = Vec::new();
        let mut train_mse = Vec::new();
        let mut valid_mse = Vec::new();
        let mut best = (mse(y_valid, &f_valid), 0usize);
        let mut residual = vec![0.0; n];
        for round in 1..=params.max_rounds {
            for i in 0..n {
                residual[i] = y[i] - f_train[i];
            }
            let tree = grower.grow(&residual, (0..n).collect());
            if let [Node::Leaf(v)] = tree.nodes[..] {
                if v == 0.0 {
                    // nothing left to fit
                    break;
                }
            }
            for (f, row) in f_train.iter_mut().zip(&rows_train) {
                *f += tree.predict_row(row);
            }
            for (f, row) in f_valid.iter_mut().zip(&rows_valid) {
                *f += tree.predict_row(row);
            }
            trees.push(tree);
            train_mse.push(mse(y, &f_train));
            if use_valid {
                let v = mse(y_valid, &f_valid);
                valid_mse.push(v);
                if v < best.0 {
                    best = (v, round);
                } else if round - best.1 >= params.early_stop_patience {
                    break;
                }
            } else {
                best.1 = round;
            }
        }
        trees.truncate(best.1);
        Self {
            base,
            trees,
            trace: BoostTrace {
                rounds_used: best.1,
                train_mse,
                valid_mse,
            },
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.base + self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::derive_rng;
    use ndarray::Array2;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn binner_thresholds() {
        let x = Array2::from_shape_vec((4, 1), vec![3.0, 1.0, 2.0, 2.0]).unwrap();
        let b = Binner::fit(x.view(), 255);
        assert_eq!(b.thresholds[0], vec![1.5, 2.5]);
        assert_eq!(
            (b.bin(0, 1.0), b.bin(0, 1.5), b.bin(0, 2.0), b.bin(0, 9.0)),
            (0, 0, 1, 2)
        );
    }

    #[test]
    fn binner_caps_threshold_count() {
        let x = Array2::from_shape_fn((10_000, 1), |(i, _)| i as f64);
        let b = Binner::fit(x.view(), 255);
        assert!(b.thresholds[0].len() <= 254);
        assert!(b.thresholds[0].windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn training_loss_never_increases() {
        let mut g = derive_rng(4, &[]).rng();
        let x = Array2::from_shape_fn((400, 3), |_| g.gen::<f64>());
        let y: Vec<f64> = (0..400)
            .map(|i| {
                (6.0 * x[[i, 0]]).sin()
                    + x[[i, 1]] * x[[i, 2]]
                    + 0.3 * Distribution::<f64>::sample(&StandardNormal, &mut g)
            })
            .collect();
        let p = BoostParams {
            max_rounds: 200,
            ..Default::default()
        };
        let empty = Array2::zeros((0, 3));
        let m = BoostedModel::fit(&p, x.view(), &y, empty.view(), &[]);
        assert_eq!(m.trace.rounds_used, 200);
        let t = &m.trace.train_mse;
        assert!(t.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }
}
