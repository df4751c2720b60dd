//! Exact Euclidean nearest neighbours with uniformly random tie breaking.
//!
//! Both search strategies return, for every row, the full sorted set of rows
//! at minimal distance. Ties are then broken row by row, in row order, from a
//! single random stream, so the resulting map does not depend on which
//! strategy found the candidates.

use ndarray::ArrayView2;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tabular::RngStream;

/// Above this many rows the k-d tree replaces the quadratic scan.
pub const KD_TREE_THRESHOLD: usize = 2000;

const LEAF_SIZE: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum NeighborSearch {
    #[default]
    Auto,
    Exhaustive,
    KdTree,
}

/// `m[i]` is the nearest neighbour of row `i` (never `i` itself).
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborMap {
    pub m: Vec<usize>,
    /// Stream the tie draws came from.
    pub tie_stream: RngStream,
    /// Rows that had more than one nearest neighbour.
    pub tied_rows: usize,
}

impl NeighborMap {
    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        s += d * d;
    }
    s
}

struct Points<'a> {
    data: &'a [f64],
    dim: usize,
}

impl Points<'_> {
    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

fn exhaustive_candidates(pts: &Points<'_>, n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let q = pts.row(i);
            let mut best = f64::INFINITY;
            let mut cands = Vec::new();
            for l in (0..n).filter(|&l| l != i) {
                let d = sq_dist(q, pts.row(l));
                if d < best {
                    best = d;
                    cands.clear();
                    cands.push(l);
                } else if d == best {
                    cands.push(l);
                }
            }
            cands
        })
        .collect()
}

enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

struct KdTree<'a> {
    pts: &'a Points<'a>,
    idx: Vec<usize>,
    nodes: Vec<Node>,
}

impl<'a> KdTree<'a> {
    fn build(pts: &'a Points<'a>, n: usize) -> Self {
        let mut tree = KdTree {
            pts,
            idx: (0..n).collect(),
            nodes: Vec::new(),
        };
        tree.build_node(0, n);
        tree
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { start, end });
        if end - start <= LEAF_SIZE {
            return id;
        }
        let pts = self.pts;
        let (mut dim, mut spread) = (0, 0.0);
        for d in 0..pts.dim {
            let (lo, hi) = self.idx[start..end]
                .iter()
                .map(|&i| pts.row(i)[d])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            if hi - lo > spread {
                spread = hi - lo;
                dim = d;
            }
        }
        if spread == 0.0 {
            // all rows identical
            return id;
        }
        let mid = start + (end - start) / 2;
        self.idx[start..end].select_nth_unstable_by(mid - start, |&a, &b| pts.row(a)[dim].total_cmp(&pts.row(b)[dim]));
        let value = pts.row(self.idx[mid])[dim];
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split {
            dim,
            value,
            left,
            right,
        };
        id
    }

    fn candidates(&self, i: usize) -> Vec<usize> {
        let mut best = f64::INFINITY;
        let mut cands = Vec::new();
        self.visit(0, i, self.pts.row(i), &mut best, &mut cands);
        cands.sort_unstable();
        cands
    }

    fn visit(&self, node: usize, i: usize, q: &[f64], best: &mut f64, cands: &mut Vec<usize>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &l in &self.idx[start..end] {
                    if l == i {
                        continue;
                    }
                    let d = sq_dist(q, self.pts.row(l));
                    if d < *best {
                        *best = d;
                        cands.clear();
                        cands.push(l);
                    } else if d == *best {
                        cands.push(l);
                    }
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let diff = q[dim] - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.visit(near, i, q, best, cands);
                // ties at exactly the bound must still be collected
                if diff * diff <= *best {
                    self.visit(far, i, q, best, cands);
                }
            }
        }
    }
}

fn kd_candidates(pts: &Points<'_>, n: usize) -> Vec<Vec<usize>> {
    let tree = KdTree::build(pts, n);
    (0..n).into_par_iter().map(|i| tree.candidates(i)).collect()
}

pub fn nearest_neighbors(x: ArrayView2<'_, f64>, rng: &RngStream) -> Result<NeighborMap> {
    nearest_neighbors_with(x, rng, NeighborSearch::Auto)
}

pub fn nearest_neighbors_with(x: ArrayView2<'_, f64>, rng: &RngStream, search: NeighborSearch) -> Result<NeighborMap> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::TooFewRows { n, min: 2 });
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let owned;
    let data = match x.as_slice() {
        Some(s) => s,
        None => {
            owned = x.as_standard_layout().into_owned();
            owned.as_slice().expect("standard layout")
        }
    };
    let pts = Points { data, dim: x.ncols() };
    let use_tree = match search {
        NeighborSearch::Auto => n > KD_TREE_THRESHOLD,
        NeighborSearch::Exhaustive => false,
        NeighborSearch::KdTree => true,
    };
    let cands = if use_tree {
        kd_candidates(&pts, n)
    } else {
        exhaustive_candidates(&pts, n)
    };
    let mut draws = rng.rng();
    let mut tied_rows = 0;
    let m = cands
        .into_iter()
        .map(|c| {
            if c.len() > 1 {
                tied_rows += 1;
                c[draws.gen_range(0..c.len())]
            } else {
                c[0]
            }
        })
        .collect();
    Ok(NeighborMap {
        m,
        tie_stream: rng.clone(),
        tied_rows,
    })
}
