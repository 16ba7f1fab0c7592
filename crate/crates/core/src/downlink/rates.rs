//! Downlink NOMA rates: instantaneous, ergodic and outage.
//!
//! With aligned detection every pair sees a scalar channel whose gain is
//! `1/‖v‖²`. For `N = M` that gain is Exp(1), which gives the exact ergodic
//! rates and outage probabilities below; for `N > M` only bounds through the
//! largest Wishart eigenvalue are available.

use std::f64::consts::LN_2;

use crate::channel::{PairConfig, SystemConfig};
use crate::error::{Error, Result};
use crate::mathkit::{integrate, rate_integral_exp0, WishartMaxEig, EULER_GAMMA};

use super::detection::PairGains;

/// `(R_near, R_far)` for one pair at power `c` given the post-detection gains.
pub fn instantaneous_rates(pair: &PairConfig, gains: PairGains, c: f64) -> (f64, f64) {
    let near = (pair.alpha_near * gains.near * c).log2_1p();
    let signal = pair.alpha_far * gains.far * c;
    let interference = pair.alpha_near * gains.far * c;
    let far = (signal / (interference + 1.0)).log2_1p();
    (near, far)
}

trait Log2OnePlus {
    fn log2_1p(self) -> f64;
}

impl Log2OnePlus for f64 {
    fn log2_1p(self) -> f64 {
        self.ln_1p() / LN_2
    }
}

fn require_square(config: &SystemConfig, what: &str) -> Result<()> {
    if config.ut_antennas != config.bs_antennas {
        return Err(Error::Unsupported(format!(
            "{what} needs N = M (got N = {}, M = {}); use the Wishart bounds instead",
            config.ut_antennas, config.bs_antennas
        )));
    }
    Ok(())
}

fn check_power(s: f64) -> Result<()> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::param("s_star", format!("power must be finite and >= 0, got {s}")));
    }
    Ok(())
}

/// Exact per-UT ergodic rates for `N = M`.
pub fn ecr_sc_closed(config: &SystemConfig, pair: &PairConfig, s: f64) -> Result<(f64, f64)> {
    require_square(config, "closed-form ECR")?;
    check_power(s)?;
    let near = rate_integral_exp0(pair.alpha_near * pair.pathloss_near * s);
    let far = rate_integral_exp0(pair.pathloss_far * s) - rate_integral_exp0(pair.alpha_near * pair.pathloss_far * s);
    Ok((near, far))
}

/// Upper bounds on the per-UT ergodic rates via `1/‖v‖² ≤ λ_max(H^H H)`.
pub fn ecr_sc_upper(config: &SystemConfig, pair: &PairConfig, s: f64) -> Result<(f64, f64)> {
    check_power(s)?;
    if s == 0.0 {
        return Ok((0.0, 0.0));
    }
    let dist = WishartMaxEig::new(config.bs_antennas, config.ut_antennas)?;
    let top = dist.upper_support(1e-15);
    let expect = |rate: &dyn Fn(f64) -> f64| {
        integrate(|x| if x > 0.0 { rate(x) * dist.pdf(x).unwrap_or(0.0) } else { 0.0 }, 0.0, top, 1e-12, 1e-12)
    };
    let near = expect(&|x| (pair.alpha_near * pair.pathloss_near * s * x).log2_1p());
    let far = expect(&|x| {
        let g = PairGains { near: 0.0, far: pair.pathloss_far * x };
        instantaneous_rates(pair, g, s).1
    });
    Ok((near, far))
}

/// Normalised SNR thresholds: outage happens when the Exp(1) gain falls below
/// `rho / s`. `rho_far = None` means the far UT is always in outage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageThresholds {
    pub rho_near: f64,
    pub rho_far: Option<f64>,
}

impl OutageThresholds {
    pub fn new(pair: &PairConfig) -> Self {
        let tn = pair.target_rate_near.exp2() - 1.0;
        let tf = pair.target_rate_far.exp2() - 1.0;
        let rho_near = tn / (pair.alpha_near * pair.pathloss_near);
        let margin = pair.alpha_far - tf * pair.alpha_near;
        let rho_far = (margin > 0.0).then(|| tf / (pair.pathloss_far * margin));
        Self { rho_near, rho_far }
    }
}

/// Exact outage probabilities for `N = M`.
pub fn op_sc_closed(config: &SystemConfig, pair: &PairConfig, s: f64) -> Result<(f64, f64)> {
    require_square(config, "closed-form OP")?;
    check_power(s)?;
    let th = OutageThresholds::new(pair);
    let Some(rho_far) = th.rho_far else {
        return Ok((1.0, 1.0));
    };
    if s == 0.0 {
        return Ok((1.0, 1.0));
    }
    let near = -(-(th.rho_near + rho_far) / s).exp_m1();
    let far = -(-rho_far / s).exp_m1();
    Ok((near, far))
}

/// Lower bounds on the outage probabilities through the largest-eigenvalue CDF.
pub fn op_lower_bounds(config: &SystemConfig, pair: &PairConfig, s: f64) -> Result<(f64, f64)> {
    check_power(s)?;
    let dist = WishartMaxEig::new(config.bs_antennas, config.ut_antennas)?;
    let th = OutageThresholds::new(pair);
    let Some(rho_far) = th.rho_far else {
        return Ok((1.0, 1.0));
    };
    if s == 0.0 {
        return Ok((1.0, 1.0));
    }
    let f_near = dist.cdf(th.rho_near / s)?;
    let f_far = dist.cdf(rho_far / s)?;
    Ok((f_near + f_far - f_near * f_far, f_far))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutageAsymptote {
    /// Leading term of the Wishart lower bound, decaying as `p^{-MN}`.
    Bound,
    /// Leading term of the exact OP for `N = M`, decaying as `p^{-1}`.
    Exact,
}

/// High-SNR outage with equal power `p/M` per pair.
pub fn op_asymptotic(config: &SystemConfig, pair: &PairConfig, p: f64, variant: OutageAsymptote) -> Result<(f64, f64)> {
    check_power(p)?;
    let th = OutageThresholds::new(pair);
    let Some(rho_far) = th.rho_far else {
        return Ok((1.0, 1.0));
    };
    let m = config.bs_antennas as f64;
    match variant {
        OutageAsymptote::Bound => {
            let d = (config.bs_antennas * config.ut_antennas) as i32;
            let scale = (m / p).powi(d);
            Ok((scale * (th.rho_near.powi(d) + rho_far.powi(d)), (m * rho_far / p).powi(d)))
        }
        OutageAsymptote::Exact => {
            require_square(config, "exact OP asymptote")?;
            Ok((m * (th.rho_near + rho_far) / p, m * rho_far / p))
        }
    }
}

/// Sum ECR for `N = M` given the sensing-centric powers.
pub fn ecr_sc_sum_closed(config: &SystemConfig, powers: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (pair, &s) in config.pairs.iter().zip(powers) {
        let (n, f) = ecr_sc_closed(config, pair, s)?;
        total += n + f;
    }
    Ok(total)
}

/// High-SNR sum ECR `M(log2 p - log2 M - C/ln 2) + Σ log2 η_m`.
pub fn ecr_sc_sum_asymptotic(config: &SystemConfig, p: f64) -> f64 {
    let m = config.bs_antennas as f64;
    let offset: f64 = config.pairs.iter().map(|pair| pair.pathloss_near.log2()).sum();
    m * (p.log2() - m.log2() - EULER_GAMMA / LN_2) + offset
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_thresholds() {
        let th = OutageThresholds::new(&PairConfig::reference());
        assert!((th.rho_near - 500.0).abs() < 1e-9);
        assert!((th.rho_far.unwrap() - 2000.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn aggressive_far_target_is_certain_outage() {
        let mut pair = PairConfig::reference();
        pair.target_rate_far = 3.0; // 7 · 0.2 > 0.8
        assert_eq!(OutageThresholds::new(&pair).rho_far, None);
        let cfg = SystemConfig::reference();
        assert_eq!(op_sc_closed(&cfg, &pair, 1e9).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn zero_power_gives_zero_rate() {
        let pair = PairConfig::reference();
        let g = PairGains { near: 3.0, far: 2.0 };
        assert_eq!(instantaneous_rates(&pair, g, 0.0), (0.0, 0.0));
        let cfg = SystemConfig::reference();
        assert_eq!(ecr_sc_closed(&cfg, &pair, 0.0).unwrap(), (0.0, 0.0));
        assert_eq!(ecr_sc_upper(&cfg, &pair, 0.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn closed_forms_need_square_arrays() {
        let mut cfg = SystemConfig::reference();
        cfg.ut_antennas = 5;
        let pair = PairConfig::reference();
        assert!(matches!(ecr_sc_closed(&cfg, &pair, 1.0), Err(Error::Unsupported(_))));
        assert!(matches!(op_sc_closed(&cfg, &pair, 1.0), Err(Error::Unsupported(_))));
        assert!(ecr_sc_upper(&cfg, &pair, 1.0).is_ok());
    }
}
