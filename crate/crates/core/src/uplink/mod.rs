//! Uplink ISAC: NOMA pairs share one effective channel through null-space
//! precoding, while the BS also receives the echo of its own sensing waveform.

mod alignment;
mod rates;
mod waveform;

pub use alignment::{align_realization, build_detection, build_precoders, UplinkBatch, UplinkDetection, UplinkPrecoders};
pub use rates::{
    comm_snr_gap, sensing_snr_gap, time_share_point, uplink_cc_ecr, uplink_cc_ecr_asymptotic, uplink_cc_op,
    uplink_cc_op_asymptotic, uplink_pair_rates, uplink_sc_ecr, uplink_sc_ecr_asymptotic, uplink_sc_ecr_frame,
    uplink_sc_op, uplink_sc_op_asymptotic, UplinkAggregates,
};
pub use waveform::{cc_sensing, sc_sensing_waveform, waveform_from_allocation, SensingWaveform, Spreading};
