//! Signal-alignment detection vectors.
//!
//! Both UTs of pair `m` choose `v` with `H^H v = u_m`, so their effective
//! channels coincide with the `m`-th eigenvector of the sensing correlation and
//! the other pairs' beams are nulled.

use crate::channel::{DownlinkPairChannel, DownlinkRealization, PairConfig, SensingCorrelation};
use crate::error::{Error, Result};
use crate::linalg::{inverse_with_condition, squared_norm, CMat, CVec};

/// Condition estimate above which a channel draw counts as rank deficient.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct PairDetection {
    pub v_near: CVec,
    pub v_far: CVec,
}

/// Post-detection gain per unit power for each UT of a pair, path loss included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGains {
    pub near: f64,
    pub far: f64,
}

impl PairDetection {
    pub fn gains(&self, pair: &PairConfig) -> PairGains {
        PairGains { near: pair.pathloss_near / squared_norm(&self.v_near), far: pair.pathloss_far / squared_norm(&self.v_far) }
    }
}

/// Minimum-norm solution of `H^H v = u` (unique when `H` is square).
fn align(h: &CMat, u: &CVec) -> Result<CVec> {
    let (n, m) = h.shape();
    if n == m {
        let (inv, cond) = inverse_with_condition(&h.adjoint())
            .ok_or_else(|| Error::Degenerate("singular downlink channel".into()))?;
        if cond > MAX_CONDITION {
            return Err(Error::Degenerate(format!("downlink channel condition {cond:.3e}")));
        }
        Ok(inv * u)
    } else {
        let gram = h.adjoint() * h;
        let (inv, cond) = inverse_with_condition(&gram)
            .ok_or_else(|| Error::Degenerate("singular downlink channel".into()))?;
        if cond.sqrt() > MAX_CONDITION {
            return Err(Error::Degenerate(format!("downlink channel condition {:.3e}", cond.sqrt())));
        }
        Ok(h * (inv * u))
    }
}

pub fn detection_vectors(channel: &DownlinkPairChannel, u: &CVec) -> Result<PairDetection> {
    Ok(PairDetection { v_near: align(&channel.h_near, u)?, v_far: align(&channel.h_far, u)? })
}

/// Detection vectors for every pair, pair `m` aligned to the `m`-th eigenvector.
pub fn detect_all(realization: &DownlinkRealization, corr: &SensingCorrelation) -> Result<Vec<PairDetection>> {
    let u = corr.eigenvectors();
    realization
        .pairs
        .iter()
        .enumerate()
        .map(|(m, ch)| detection_vectors(ch, &u.column(m).into_owned()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, C64};

    #[test]
    fn identity_channel_returns_target() {
        let ch = DownlinkPairChannel { h_near: identity(3), h_far: identity(3) };
        let mut u = CVec::zeros(3);
        u[0] = C64::new(1.0, 0.0);
        let d = detection_vectors(&ch, &u).unwrap();
        assert_eq!(d.v_near, u);
        assert_eq!(d.v_far, u);
    }

    #[test]
    fn singular_channel_is_degenerate() {
        let mut h = identity(2);
        h[(1, 1)] = C64::new(0.0, 0.0);
        let ch = DownlinkPairChannel { h_near: h.clone(), h_far: h };
        let u = CVec::from_element(2, C64::new(1.0, 0.0));
        assert!(matches!(detection_vectors(&ch, &u), Err(Error::Degenerate(_))));
    }
}
