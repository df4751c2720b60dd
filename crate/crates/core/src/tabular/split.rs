use rand::seq::SliceRandom;
use serde::Serialize;

use super::rng::derive_rng;
use crate::error::{Error, Result};

/// Label under which split permutations live in the seed tree.
const SPLIT_DOMAIN: u64 = 0x5_0117;

/// Smallest sample for which a half split leaves two rows on each side.
pub const MIN_SPLIT_ROWS: usize = 4;

/// A random partition of `0..n` into halves of size ⌊n/2⌋ and ⌈n/2⌉.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitPlan {
    pub seed: u64,
    pub b: u64,
    /// Sorted indices, ⌊n/2⌋ of them.
    pub half_a: Vec<usize>,
    /// Sorted complement of `half_a`.
    pub half_b: Vec<usize>,
}

impl SplitPlan {
    pub fn n(&self) -> usize {
        self.half_a.len() + self.half_b.len()
    }

    /// (fit half, evaluation half) for the requested orientation.
    pub fn halves(&self, swapped: bool) -> (&[usize], &[usize]) {
        if swapped {
            (&self.half_b, &self.half_a)
        } else {
            (&self.half_a, &self.half_b)
        }
    }
}

pub fn make_split(n: usize, seed: u64, b: u64) -> Result<SplitPlan> {
    if n < MIN_SPLIT_ROWS {
        return Err(Error::TooFewRows { n, min: MIN_SPLIT_ROWS });
    }
    let mut rng = derive_rng(seed, &[SPLIT_DOMAIN, b]).rng();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng);
    let mut half_a = idx[..n / 2].to_vec();
    let mut half_b = idx[n / 2..].to_vec();
    half_a.sort_unstable();
    half_b.sort_unstable();
    Ok(SplitPlan {
        seed,
        b,
        half_a,
        half_b,
    })
}
