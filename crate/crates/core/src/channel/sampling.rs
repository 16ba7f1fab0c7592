//! Seeded Rayleigh channel and target-response draws.
//!
//! Every draw is keyed by `(seed, trial, stream)`, so trials can run in any
//! order or in parallel and still reproduce bit for bit.

use crate::linalg::{complex_gaussian_matrix, CMat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{SensingCorrelation, SystemConfig};

/// Independent random streams within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    DownlinkChannel,
    UplinkChannel,
    TargetResponse,
    Eigenbasis,
    /// Uplink null-space combiners.
    Combiner,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::DownlinkChannel => 0x11,
            Stream::UplinkChannel => 0x22,
            Stream::TargetResponse => 0x33,
            Stream::Eigenbasis => 0x44,
            Stream::Combiner => 0x55,
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream_rng(seed: u64, trial: u64, stream: Stream) -> ChaCha8Rng {
    let mut state = seed;
    let a = splitmix64(&mut state);
    state ^= trial.wrapping_mul(0xD6E8_FEB8_6659_FD93);
    let b = splitmix64(&mut state);
    state ^= stream.tag().wrapping_mul(0xA076_1D64_78BD_642F);
    let c = splitmix64(&mut state);
    let d = splitmix64(&mut state);
    let mut key = [0u8; 32];
    for (chunk, word) in key.chunks_exact_mut(8).zip([a, b, c, d]) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DownlinkPairChannel {
    /// `N×M` channel to the near UT.
    pub h_near: CMat,
    pub h_far: CMat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DownlinkRealization {
    pub pairs: Vec<DownlinkPairChannel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UplinkPairChannel {
    /// `M×N` channel from the near UT.
    pub h_near: CMat,
    pub h_far: CMat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UplinkRealization {
    pub pairs: Vec<UplinkPairChannel>,
}

pub fn sample_downlink(config: &SystemConfig, seed: u64, trial: u64) -> DownlinkRealization {
    let (m, n) = (config.bs_antennas, config.ut_antennas);
    let mut rng = stream_rng(seed, trial, Stream::DownlinkChannel);
    let pairs = (0..config.pairs.len())
        .map(|_| {
            let h_near = complex_gaussian_matrix(&mut rng, n, m);
            let h_far = complex_gaussian_matrix(&mut rng, n, m);
            DownlinkPairChannel { h_near, h_far }
        })
        .collect();
    DownlinkRealization { pairs }
}

pub fn sample_uplink(config: &SystemConfig, seed: u64, trial: u64) -> UplinkRealization {
    let (m, n) = (config.bs_antennas, config.ut_antennas);
    let mut rng = stream_rng(seed, trial, Stream::UplinkChannel);
    let pairs = (0..config.pairs.len())
        .map(|_| {
            let h_near = complex_gaussian_matrix(&mut rng, m, n);
            let h_far = complex_gaussian_matrix(&mut rng, m, n);
            UplinkPairChannel { h_near, h_far }
        })
        .collect();
    UplinkRealization { pairs }
}

/// Target response `G` whose rows are `g_m^H` with `g_m ~ CN(0, R)` i.i.d.
pub fn sample_target_response(corr: &SensingCorrelation, seed: u64, trial: u64) -> CMat {
    let dim = corr.dim();
    let mut rng = stream_rng(seed, trial, Stream::TargetResponse);
    // Columns of R^{1/2} Ξ are the g_m.
    let xi = complex_gaussian_matrix(&mut rng, dim, dim);
    (corr.sqrt() * xi).adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let cfg = SystemConfig::reference();
        let a = sample_downlink(&cfg, 9, 4);
        assert_eq!(a, sample_downlink(&cfg, 9, 4));
        assert_ne!(a, sample_downlink(&cfg, 9, 5));
        assert_ne!(a, sample_downlink(&cfg, 10, 4));
        let u = sample_uplink(&cfg, 9, 4);
        assert_ne!(u.pairs[0].h_near, a.pairs[0].h_near);
    }

    #[test]
    fn shapes_follow_link_direction() {
        let mut cfg = SystemConfig::reference();
        cfg.ut_antennas = 6;
        let d = sample_downlink(&cfg, 1, 0);
        assert_eq!(d.pairs.len(), 4);
        assert_eq!(d.pairs[0].h_near.shape(), (6, 4));
        let u = sample_uplink(&cfg, 1, 0);
        assert_eq!(u.pairs[0].h_far.shape(), (4, 6));
    }
}
