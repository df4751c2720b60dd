//! Structural causal model simulation, graphical ground truth and evaluation
//! metrics.

mod graph;
mod metrics;
mod sim;
mod spec;
mod suites;
mod truth;

pub use graph::{d_separated, d_separated_names, Dag};
pub use metrics::{amp, fpr_tpr, fpr_tpr_sets, relative_bias, Rates};
pub use sim::{simulate, write_csv, SimOutput, SimRow, Suite};
pub use spec::{EdgeFn, Mechanism, NodeSpec, Noise, NoiseLaw, Sample, ScmSpec, Term};
pub use suites::{
    fig1_left, fig1_right, fig2_subsets, fig2_suite, lsnm_population_residual, lsnm_suite, lsnm_suite_with, LsnmParams,
    FIG2_PREDICTORS,
};
pub use truth::{ground_truth_w, GroundTruth};
