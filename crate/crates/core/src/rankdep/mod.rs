//! Rank statistics, nearest neighbours, the rank dependence coefficient and
//! forward selection built on it.

mod codec;
mod foci;
mod neighbors;
mod ranks;
mod transform;

pub use codec::{codec_q, codec_s_conditional, codec_s_unconditional, codec_t, to_f64, DependenceStat, Rational};
pub use foci::{foci_select, foci_select_with, FociOptions, FociResult};
pub use neighbors::{nearest_neighbors, nearest_neighbors_with, NeighborMap, NeighborSearch, KD_TREE_THRESHOLD};
pub use ranks::{ranks, RankVector};
pub use transform::{transform_g, Transform};
