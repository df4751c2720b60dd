//! Independence tests, p-value aggregation and two-sample tests.

mod aggregate;
mod fisher;
mod hsic;
mod kernel;
mod mannwhitney;

pub use aggregate::{aggregate_pvalues, AggregatedPValue, DEFAULT_GAMMA_MIN};
pub use fisher::fisher_exact_less;
pub use hsic::{
    hsic_gamma_test, hsic_perm_test, hsic_stat, hsic_test, HsicMethod, HsicResult, DEFAULT_PERMUTATIONS,
    MIN_PERMUTATIONS,
};
pub use kernel::{gaussian_gram, median_bandwidth};
pub use mannwhitney::{mann_whitney_u, EXACT_MAX_TOTAL};
