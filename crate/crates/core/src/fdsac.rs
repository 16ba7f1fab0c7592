//! Frequency-division baseline: a fraction `κ` of the band (and downlink a
//! fraction `μ` of the power) serves communications, the rest sensing.

use rayon::prelude::*;
use std::f64::consts::LN_2;

use crate::channel::{SensingCorrelation, SystemConfig};
use crate::downlink::{comm_allocation, eigen_sensing_rate, DownlinkBatch};
use crate::error::{Error, Result};
use crate::mathkit::{rate_integral_exp0, water_fill};
use crate::montecarlo::MonteCarloEstimate;
use crate::uplink::UplinkAggregates;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdsacSplit {
    /// Bandwidth fraction for communications.
    pub kappa: f64,
    /// Downlink power fraction for communications.
    pub mu: f64,
}

impl FdsacSplit {
    pub fn new(kappa: f64, mu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&kappa) {
            return Err(Error::param("kappa", format!("must lie in [0, 1], got {kappa}")));
        }
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::param("mu", format!("must lie in [0, 1], got {mu}")));
        }
        Ok(Self { kappa, mu })
    }

    pub fn from_config(config: &SystemConfig) -> Result<Self> {
        Self::new(config.fdsac_bandwidth_frac, config.fdsac_power_frac)
    }
}

/// Downlink sensing rate on `1-κ` of the band with `(1-μ)p` of the power.
pub fn fdsac_dl_sr(corr: &SensingCorrelation, split: FdsacSplit, p: f64, frame_len: usize) -> Result<f64> {
    let band = 1.0 - split.kappa;
    if band <= 0.0 {
        return Ok(0.0);
    }
    let gains: Vec<f64> = corr.eigenvalues().iter().map(|l| frame_len as f64 * l / band).collect();
    let wf = water_fill(&gains, (1.0 - split.mu) * p)?;
    Ok(eigen_sensing_rate(corr.eigenvalues(), &wf.allocation, frame_len, split.kappa))
}

/// Per-realization downlink communication rates on `κ` of the band with `μp`.
pub fn fdsac_dl_ecr_samples(config: &SystemConfig, batch: &DownlinkBatch, split: FdsacSplit, p: f64) -> Vec<f64> {
    batch
        .gains
        .par_iter()
        .map(|gains| {
            let sol = comm_allocation(&config.pairs, gains, split.mu * p, split.kappa);
            crate::downlink::comm_rate_in_band(&config.pairs, gains, &sol.allocation, split.kappa)
        })
        .collect()
}

pub fn fdsac_dl_ecr(config: &SystemConfig, batch: &DownlinkBatch, split: FdsacSplit, p: f64) -> MonteCarloEstimate {
    MonteCarloEstimate::from_samples(&fdsac_dl_ecr_samples(config, batch, split, p), batch.discarded)
}

/// Uplink `(SR, ECR)` with `κ` of the band for communications and the
/// sensing-centric waveform energies `allocation` squeezed into the rest.
pub fn fdsac_ul_rates(
    corr: &SensingCorrelation,
    kappa: f64,
    p_c: f64,
    p_s: f64,
    frame_len: usize,
    agg: &UplinkAggregates,
) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::param("kappa", format!("must lie in [0, 1], got {kappa}")));
    }
    let ecr = if kappa == 0.0 { 0.0 } else { kappa * agg.delta.iter().map(|d| rate_integral_exp0(p_c * d / kappa)).sum::<f64>() };
    let band = 1.0 - kappa;
    let sr = if band <= 0.0 {
        0.0
    } else {
        let wf = water_fill(corr.eigenvalues(), frame_len as f64 * p_s)?;
        let m = corr.dim() as f64;
        let sum: f64 = corr.eigenvalues().iter().zip(&wf.allocation).map(|(lam, z)| (lam * z / band).ln_1p()).sum();
        m * band / frame_len as f64 * sum / LN_2
    };
    Ok((sr, ecr))
}
