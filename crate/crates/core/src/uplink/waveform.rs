//! Uplink sensing waveforms on the eigenbasis of the sensing correlation.

use std::f64::consts::{LN_2, PI};

use crate::channel::SensingCorrelation;
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::mathkit::water_fill;

use super::rates::UplinkAggregates;

/// Row-orthonormal `M×L` spreading of the eigen-streams over the frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Spreading {
    /// `[I_M, 0]`: stream `m` occupies slot `m` only.
    Identity,
    /// First `M` rows of the unitary DFT: every slot carries the same energy.
    #[default]
    EqualPower,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensingWaveform {
    /// `M×L` waveform.
    pub x: CMat,
    pub gram: CMat,
    /// `x_l^H R x_l + 1` for each slot.
    pub per_slot_sigma: Vec<f64>,
    /// Per-eigendirection energy over the frame.
    pub allocation: Vec<f64>,
    pub sensing_rate: f64,
}

impl SensingWaveform {
    pub fn mean_sigma(&self) -> f64 {
        self.per_slot_sigma.iter().sum::<f64>() / self.per_slot_sigma.len() as f64
    }
}

fn spreading_matrix(kind: Spreading, m: usize, l: usize) -> CMat {
    match kind {
        Spreading::Identity => CMat::from_fn(m, l, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }),
        Spreading::EqualPower => {
            let scale = 1.0 / (l as f64).sqrt();
            CMat::from_fn(m, l, |i, j| C64::from_polar(scale, -2.0 * PI * ((i * j) % l) as f64 / l as f64))
        }
    }
}

/// `X = U diag(√ζ) E` with `noise` the effective noise floor in the rate.
pub fn waveform_from_allocation(
    corr: &SensingCorrelation,
    allocation: &[f64],
    frame_len: usize,
    spreading: Spreading,
    noise: f64,
) -> Result<SensingWaveform> {
    let m = corr.dim();
    if frame_len < m {
        return Err(Error::param("L", format!("frame length {frame_len} shorter than {m} streams")));
    }
    let mut basis = corr.eigenvectors().clone();
    for (j, &z) in allocation.iter().enumerate() {
        let mut col = basis.column_mut(j);
        col *= C64::new(z.sqrt(), 0.0);
    }
    let x = basis * spreading_matrix(spreading, m, frame_len);
    let gram = &x * x.adjoint();
    let r = corr.matrix();
    let per_slot_sigma = (0..frame_len)
        .map(|l| {
            let col = x.column(l);
            (col.adjoint() * r * col)[(0, 0)].re.abs() + 1.0
        })
        .collect();
    let sensing_rate = m as f64 / frame_len as f64
        * corr.eigenvalues().iter().zip(allocation).map(|(lam, z)| (lam * z / noise).ln_1p()).sum::<f64>()
        / LN_2;
    Ok(SensingWaveform { x, gram, per_slot_sigma, allocation: allocation.to_vec(), sensing_rate })
}

/// Sensing-centric waveform: water-filling over `λ_m` with frame energy `L p_s`.
pub fn sc_sensing_waveform(
    corr: &SensingCorrelation,
    p_s: f64,
    frame_len: usize,
    spreading: Spreading,
) -> Result<SensingWaveform> {
    let wf = water_fill(corr.eigenvalues(), frame_len as f64 * p_s)?;
    waveform_from_allocation(corr, &wf.allocation, frame_len, spreading, 1.0)
}

/// Communications-centric waveform: the decoded-last sensing stream sees the
/// communication signals as extra Gaussian noise `σ_c²`.
pub fn cc_sensing(
    corr: &SensingCorrelation,
    p_s: f64,
    frame_len: usize,
    aggregates: &UplinkAggregates,
    spreading: Spreading,
) -> Result<SensingWaveform> {
    let noise = aggregates.sigma_c2;
    let gains: Vec<f64> = corr.eigenvalues().iter().map(|l| l / noise).collect();
    let wf = water_fill(&gains, frame_len as f64 * p_s)?;
    waveform_from_allocation(corr, &wf.allocation, frame_len, spreading, noise)
}
