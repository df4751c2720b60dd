//! In-sample, sample-splitting and multisplit selection of predictors with a
//! causally well-specified effect.

mod alg;
mod config;
mod report;
mod select;

pub use alg::{
    alg1_insample, alg2_split, alg3_multisplit, heldout_residuals, split_runs, summarize, SplitRun, MIN_ROWS,
};
pub use config::AnalysisConfig;
pub use report::WellSpecReport;
pub use select::{select_well_specified, Selection};
