//! Seeded trial loops, estimators and the validation report.

mod estimate;
mod stats;
mod validation;

pub use estimate::{
    estimate_ecr, estimate_op, simulate_downlink, simulate_downlink_batch, simulate_uplink, simulate_uplink_batch,
    Design, DownlinkSamples, Link, MonteCarloEstimate, Scenario, UplinkSamples, DISCARD_BUDGET,
};
pub use stats::{estimate_diversity, estimate_slope, ks_exponential_test, SlopeFit};
pub use validation::{
    run_validation, ComparisonRow, FitKind, FitRow, RowKind, ValidationOptions, ValidationReport, CLOSED_FORM_METRICS,
    KS_LIMIT, Z_LIMIT,
};
