//! Scenario configuration, sensing correlation and seeded channel draws.

mod config;
mod correlation;
mod sampling;

pub use config::{ExperimentConfig, PairConfig, SystemConfig};
pub use correlation::{correlation_from_eigenvalues, correlation_from_targets, SensingCorrelation, TargetScene};
pub use sampling::{
    sample_downlink, sample_target_response, sample_uplink, stream_rng, DownlinkPairChannel, DownlinkRealization,
    Stream, UplinkPairChannel, UplinkRealization,
};
