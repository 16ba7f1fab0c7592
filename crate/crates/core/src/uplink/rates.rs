//! Uplink communication rates and outage under both SIC orders.
//!
//! Sensing-centric: the BS removes the communication signals first, so each
//! pair sees the sensing echo as noise with per-slot power `σ²_{s,l}`.
//! Communications-centric: the sensing echo is removed first and pairs see
//! unit noise. After zero forcing each pair has an Exp(1) gain, and the two
//! UTs of a pair sum to `log2(1 + p_c δ_m g / σ²)`.

use std::f64::consts::LN_2;

use crate::channel::{PairConfig, SystemConfig};
use crate::mathkit::{rate_integral_exp0, EULER_GAMMA};

#[derive(Debug, Clone, PartialEq)]
pub struct UplinkAggregates {
    /// `α_near η_near + α_far η_far` per pair.
    pub delta: Vec<f64>,
    /// Same quantity as seen by the sensing stream under C-C ordering.
    pub phi: Vec<f64>,
    /// `p_c Σ φ_m + 1`.
    pub sigma_c2: f64,
}

impl UplinkAggregates {
    pub fn new(config: &SystemConfig, p_c: f64) -> Self {
        let delta: Vec<f64> = config.pairs.iter().map(PairConfig::uplink_gain).collect();
        let sigma_c2 = p_c * delta.iter().sum::<f64>() + 1.0;
        Self { phi: delta.clone(), delta, sigma_c2 }
    }
}

/// Per-slot `(R_near, R_far)` with the far UT decoded first.
pub fn uplink_pair_rates(pair: &PairConfig, inv_gain: f64, p_c: f64, sigma2: f64) -> (f64, f64) {
    let near_rx = p_c * pair.alpha_near * pair.pathloss_near * inv_gain;
    let far_rx = p_c * pair.alpha_far * pair.pathloss_far * inv_gain;
    let far = (far_rx / (near_rx + sigma2)).ln_1p() / LN_2;
    let near = (near_rx / sigma2).ln_1p() / LN_2;
    (near, far)
}

/// Sum ECR with sensing interference `σ²` in one slot.
pub fn uplink_sc_ecr(agg: &UplinkAggregates, sigma2: f64, p_c: f64) -> f64 {
    agg.delta.iter().map(|d| rate_integral_exp0(p_c * d / sigma2)).sum()
}

/// Slot-averaged S-C sum ECR over a frame.
pub fn uplink_sc_ecr_frame(agg: &UplinkAggregates, per_slot_sigma: &[f64], p_c: f64) -> f64 {
    per_slot_sigma.iter().map(|&s| uplink_sc_ecr(agg, s, p_c)).sum::<f64>() / per_slot_sigma.len() as f64
}

pub fn uplink_sc_ecr_asymptotic(agg: &UplinkAggregates, sigma2: f64, p_c: f64) -> f64 {
    agg.delta.iter().map(|d| p_c.log2() + d.log2() - sigma2.log2() - EULER_GAMMA / LN_2).sum()
}

/// Per-pair S-C outage probability in one slot.
pub fn uplink_sc_op(agg: &UplinkAggregates, pairs: &[PairConfig], sigma2: f64, p_c: f64) -> Vec<f64> {
    agg.delta
        .iter()
        .zip(pairs)
        .map(|(d, pair)| {
            if p_c == 0.0 {
                1.0
            } else {
                -(-sigma2 * (pair.target_rate_pair.exp2() - 1.0) / (p_c * d)).exp_m1()
            }
        })
        .collect()
}

pub fn uplink_sc_op_asymptotic(agg: &UplinkAggregates, pairs: &[PairConfig], sigma2: f64, p_c: f64) -> Vec<f64> {
    agg.delta.iter().zip(pairs).map(|(d, pair)| sigma2 * (pair.target_rate_pair.exp2() - 1.0) / (p_c * d)).collect()
}

pub fn uplink_cc_ecr(agg: &UplinkAggregates, p_c: f64) -> f64 {
    uplink_sc_ecr(agg, 1.0, p_c)
}

pub fn uplink_cc_ecr_asymptotic(agg: &UplinkAggregates, p_c: f64) -> f64 {
    uplink_sc_ecr_asymptotic(agg, 1.0, p_c)
}

pub fn uplink_cc_op(agg: &UplinkAggregates, pairs: &[PairConfig], p_c: f64) -> Vec<f64> {
    uplink_sc_op(agg, pairs, 1.0, p_c)
}

pub fn uplink_cc_op_asymptotic(agg: &UplinkAggregates, pairs: &[PairConfig], p_c: f64) -> Vec<f64> {
    uplink_sc_op_asymptotic(agg, pairs, 1.0, p_c)
}

/// `τ·(SR, CR)_sc + (1-τ)·(SR, CR)_cc`.
pub fn time_share_point(tau: f64, sc: (f64, f64), cc: (f64, f64)) -> (f64, f64) {
    (tau * sc.0 + (1.0 - tau) * cc.0, tau * sc.1 + (1.0 - tau) * cc.1)
}

/// High-SNR sensing-rate gap `log2 σ_c²` (in units of `M²/L`).
pub fn sensing_snr_gap(agg: &UplinkAggregates) -> f64 {
    agg.sigma_c2.log2()
}

/// High-SNR communication-rate gap per pair, `(1/L) Σ_l log2 σ²_{s,l}`.
pub fn comm_snr_gap(per_slot_sigma: &[f64]) -> f64 {
    per_slot_sigma.iter().map(|s| s.log2()).sum::<f64>() / per_slot_sigma.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_aggregates() {
        let agg = UplinkAggregates::new(&SystemConfig::reference(), 316.227_766_016_837_94);
        for d in &agg.delta {
            assert!((d - 0.004).abs() < 1e-15);
        }
        assert_eq!(agg.delta, agg.phi);
        assert!((agg.sigma_c2 - (316.227_766_016_837_94 * 0.016 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn zero_power_is_silent() {
        let cfg = SystemConfig::reference();
        let agg = UplinkAggregates::new(&cfg, 0.0);
        assert_eq!(agg.sigma_c2, 1.0);
        assert_eq!(uplink_cc_ecr(&agg, 0.0), 0.0);
        assert_eq!(uplink_sc_ecr(&agg, 2.0, 0.0), 0.0);
        assert!(uplink_sc_op(&agg, &cfg.pairs, 1.0, 0.0).iter().all(|&p| p == 1.0));
    }

    #[test]
    fn time_share_endpoints() {
        assert_eq!(time_share_point(1.0, (3.0, 1.0), (1.0, 5.0)), (3.0, 1.0));
        assert_eq!(time_share_point(0.0, (3.0, 1.0), (1.0, 5.0)), (1.0, 5.0));
        assert_eq!(time_share_point(0.5, (3.0, 1.0), (1.0, 5.0)), (2.0, 3.0));
    }
}
