//! Downlink ISAC: one dual-function waveform per eigendirection of the
//! sensing correlation, carrying a NOMA pair.

mod cc;
mod detection;
mod pareto;
mod rates;
mod sensing;

pub use cc::{cc_design, comm_sum_rate, DownlinkBatch};
pub(crate) use cc::{comm_allocation, comm_rate_in_band};
pub use detection::{detect_all, detection_vectors, PairDetection, PairGains, MAX_CONDITION};
pub use pareto::{pareto_design, ParetoPoint};
pub use rates::{
    ecr_sc_closed, ecr_sc_sum_asymptotic, ecr_sc_sum_closed, ecr_sc_upper, instantaneous_rates, op_asymptotic,
    op_lower_bounds, op_sc_closed, OutageAsymptote, OutageThresholds,
};
pub(crate) use sensing::eigen_sensing_rate;
pub use sensing::{sc_design, sensing_mse, sr_cc, sr_given_precoder, sr_sc_asymptotic, DesignSolution, DesignTag};
