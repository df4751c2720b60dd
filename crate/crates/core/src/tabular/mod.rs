//! Data model, CSV ingestion, split planning and seeded random streams.

mod dataset;
mod rng;
mod split;

pub use dataset::{load_csv, Dataset};
pub use rng::{derive_rng, RngStream, StreamRng};
pub use split::{make_split, SplitPlan, MIN_SPLIT_ROWS};
