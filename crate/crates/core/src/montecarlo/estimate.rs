//! Sample means with standard errors and the per-trial simulators behind them.

use rayon::prelude::*;

use crate::channel::{correlation_from_eigenvalues, ExperimentConfig, SensingCorrelation, SystemConfig};
use crate::db_to_linear;
use crate::downlink::{comm_allocation, instantaneous_rates, sc_design, sr_cc, DownlinkBatch, PairGains};
use crate::error::{Error, Result};
use crate::fdsac::FdsacSplit;
use crate::uplink::{cc_sensing, sc_sensing_waveform, Spreading, UplinkAggregates, UplinkBatch};

/// Largest tolerated share of discarded realizations.
pub const DISCARD_BUDGET: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Accepted trials.
    pub trials: u64,
    /// Realizations rejected as numerically degenerate.
    pub discarded: u64,
}

impl MonteCarloEstimate {
    /// Mean and `std/√n`, summed in slice order.
    pub fn from_samples(samples: &[f64], discarded: usize) -> Self {
        let n = samples.len();
        let mean = if n == 0 { f64::NAN } else { samples.iter().sum::<f64>() / n as f64 };
        let stderr = if n < 2 {
            f64::NAN
        } else {
            let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        };
        Self { mean, stderr, trials: n as u64, discarded: discarded as u64 }
    }

    /// Outage frequency with binomial standard error. When fewer than 30
    /// trials fall on either side the Wilson (z = 1) centre is used for the
    /// spread so that zero counts still give a usable error.
    pub fn from_outcomes(hits: u64, trials: u64, discarded: usize) -> Self {
        let n = trials as f64;
        let p = hits as f64 / n;
        let stderr = if hits.min(trials - hits) < 30 {
            let centre = (hits as f64 + 0.5) / (n + 1.0);
            (centre * (1.0 - centre) / (n + 1.0)).sqrt()
        } else {
            (p * (1.0 - p) / n).sqrt()
        };
        Self { mean: p, stderr, trials, discarded: discarded as u64 }
    }

    /// Binary samples go through [`Self::from_outcomes`], fractional ones
    /// (slot-averaged outage) through [`Self::from_samples`].
    pub fn from_indicators(samples: &[f64], discarded: usize) -> Self {
        if samples.iter().all(|&x| x == 0.0 || x == 1.0) && !samples.is_empty() {
            let hits = samples.iter().filter(|&&x| x == 1.0).count() as u64;
            Self::from_outcomes(hits, samples.len() as u64, discarded)
        } else {
            Self::from_samples(samples, discarded)
        }
    }

    pub fn flagged(&self) -> bool {
        self.discarded as f64 >= DISCARD_BUDGET * (self.trials + self.discarded) as f64
    }

    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.mean - reference;
        if self.stderr > 0.0 {
            diff / self.stderr
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    Downlink,
    Uplink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Design {
    SensingCentric,
    CommunicationsCentric,
    /// Split taken from the scenario configuration.
    Fdsac,
}

impl Design {
    pub fn label(&self) -> &'static str {
        match self {
            Design::SensingCentric => "sc",
            Design::CommunicationsCentric => "cc",
            Design::Fdsac => "fdsac",
        }
    }
}

/// A configured scenario with its sensing correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: SystemConfig,
    pub corr: SensingCorrelation,
    pub spreading: Spreading,
}

impl Scenario {
    /// Builds the correlation from the configured eigenvalues with the run seed.
    pub fn from_experiment(exp: &ExperimentConfig) -> Result<Self> {
        exp.validate()?;
        Ok(Self {
            config: exp.system.clone(),
            corr: correlation_from_eigenvalues(&exp.eigenvalues, exp.seed)?,
            spreading: Spreading::default(),
        })
    }

    pub fn split(&self) -> Result<FdsacSplit> {
        FdsacSplit::from_config(&self.config)
    }
}

/// Per-trial downlink outcomes, indexed `[pair][trial]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DownlinkSamples {
    pub near_rate: Vec<Vec<f64>>,
    pub far_rate: Vec<Vec<f64>>,
    pub sensing_rate: Vec<f64>,
    pub discarded: usize,
}

impl DownlinkSamples {
    pub fn sum_rate(&self) -> Vec<f64> {
        let trials = self.sensing_rate.len();
        (0..trials)
            .map(|t| self.near_rate.iter().zip(&self.far_rate).map(|(n, f)| n[t] + f[t]).sum())
            .collect()
    }

    /// Near-UT outage: its own rate misses the target or the far message is
    /// not carried at the far target over the far link. Far-UT outage: the
    /// far rate misses its target.
    pub fn outage(&self, config: &SystemConfig, pair: usize) -> (Vec<f64>, Vec<f64>) {
        let cfg = &config.pairs[pair];
        let near = &self.near_rate[pair];
        let far = &self.far_rate[pair];
        let ind = |b: bool| if b { 1.0 } else { 0.0 };
        let near_out = near
            .iter()
            .zip(far)
            .map(|(&n, &f)| ind(!(n > cfg.target_rate_near && f > cfg.target_rate_far)))
            .collect();
        let far_out = far.iter().map(|&f| ind(!(f > cfg.target_rate_far))).collect();
        (near_out, far_out)
    }
}

fn scaled(g: &PairGains, kappa: f64) -> PairGains {
    PairGains { near: g.near / kappa, far: g.far / kappa }
}

/// Rates of every downlink trial at power `p` under `design`.
pub fn simulate_downlink(scenario: &Scenario, design: Design, p: f64, trials: u64, seed: u64) -> Result<DownlinkSamples> {
    let batch = DownlinkBatch::sample(&scenario.config, &scenario.corr, seed, trials);
    simulate_downlink_batch(scenario, design, p, &batch)
}

pub fn simulate_downlink_batch(
    scenario: &Scenario,
    design: Design,
    p: f64,
    batch: &DownlinkBatch,
) -> Result<DownlinkSamples> {
    let cfg = &scenario.config;
    let l = cfg.frame_len;
    let sc = sc_design(&scenario.corr, p, l)?;
    let split = scenario.split()?;
    let per: Vec<(Vec<(f64, f64)>, f64)> = batch
        .gains
        .par_iter()
        .map(|gains| {
            let (powers, kappa) = match design {
                Design::SensingCentric => (sc.powers.clone(), 1.0),
                Design::CommunicationsCentric => (comm_allocation(&cfg.pairs, gains, p, 1.0).allocation, 1.0),
                Design::Fdsac => {
                    (comm_allocation(&cfg.pairs, gains, split.mu * p, split.kappa).allocation, split.kappa)
                }
            };
            let rates = cfg
                .pairs
                .iter()
                .zip(gains)
                .zip(&powers)
                .map(|((pair, g), &c)| {
                    if kappa == 0.0 {
                        (0.0, 0.0)
                    } else {
                        let (n, f) = instantaneous_rates(pair, scaled(g, kappa), c);
                        (kappa * n, kappa * f)
                    }
                })
                .collect();
            let sensing = match design {
                Design::Fdsac => f64::NAN,
                _ => sr_cc(&powers, &scenario.corr, l),
            };
            (rates, sensing)
        })
        .collect();
    let pairs = cfg.pairs.len();
    let mut out = DownlinkSamples {
        near_rate: vec![Vec::with_capacity(per.len()); pairs],
        far_rate: vec![Vec::with_capacity(per.len()); pairs],
        sensing_rate: Vec::with_capacity(per.len()),
        discarded: batch.discarded,
    };
    for (rates, sensing) in per {
        for (m, (n, f)) in rates.into_iter().enumerate() {
            out.near_rate[m].push(n);
            out.far_rate[m].push(f);
        }
        out.sensing_rate.push(sensing);
    }
    Ok(out)
}

/// Per-trial uplink outcomes, indexed `[pair][trial]`, averaged over slots.
#[derive(Debug, Clone, PartialEq)]
pub struct UplinkSamples {
    pub pair_rate: Vec<Vec<f64>>,
    /// Fraction of slots in which the pair sum rate misses its target.
    pub pair_outage: Vec<Vec<f64>>,
    pub discarded: usize,
}

impl UplinkSamples {
    pub fn sum_rate(&self) -> Vec<f64> {
        let trials = self.pair_rate.first().map_or(0, Vec::len);
        (0..trials).map(|t| self.pair_rate.iter().map(|r| r[t]).sum()).collect()
    }
}

/// Per-slot interference-plus-noise seen by the pairs under `design`.
fn uplink_slot_noise(scenario: &Scenario, design: Design, p_c: f64) -> Result<Vec<f64>> {
    let cfg = &scenario.config;
    Ok(match design {
        Design::SensingCentric => {
            sc_sensing_waveform(&scenario.corr, cfg.uplink_sens_power, cfg.frame_len, scenario.spreading)?.per_slot_sigma
        }
        Design::CommunicationsCentric | Design::Fdsac => {
            // The sensing echo is cancelled first; only the waveform shape is
            // needed to confirm the frame is valid.
            let agg = UplinkAggregates::new(cfg, p_c);
            cc_sensing(&scenario.corr, cfg.uplink_sens_power, cfg.frame_len, &agg, scenario.spreading)?;
            vec![1.0; cfg.frame_len]
        }
    })
}

/// Pair sum rates of every uplink trial at communication power `p_c`.
pub fn simulate_uplink(scenario: &Scenario, design: Design, p_c: f64, trials: u64, seed: u64) -> Result<UplinkSamples> {
    let batch = UplinkBatch::sample(&scenario.config, seed, trials);
    simulate_uplink_batch(scenario, design, p_c, &batch)
}

pub fn simulate_uplink_batch(scenario: &Scenario, design: Design, p_c: f64, batch: &UplinkBatch) -> Result<UplinkSamples> {
    let cfg = &scenario.config;
    let noise = uplink_slot_noise(scenario, design, p_c)?;
    let kappa = match design {
        Design::Fdsac => scenario.split()?.kappa,
        _ => 1.0,
    };
    let slots = noise.len() as f64;
    let pairs = cfg.pairs.len();
    let mut out = UplinkSamples {
        pair_rate: vec![Vec::with_capacity(batch.len()); pairs],
        pair_outage: vec![Vec::with_capacity(batch.len()); pairs],
        discarded: batch.discarded,
    };
    for gains in &batch.inv_gains {
        for (m, (pair, &g)) in cfg.pairs.iter().zip(gains).enumerate() {
            let snr = p_c * pair.uplink_gain() * g;
            let (mut rate, mut missed) = (0.0, 0.0);
            for &sigma2 in &noise {
                let r = if kappa == 0.0 { 0.0 } else { kappa * (snr / (kappa * sigma2)).ln_1p() / std::f64::consts::LN_2 };
                rate += r;
                if !(r > pair.target_rate_pair) {
                    missed += 1.0;
                }
            }
            out.pair_rate[m].push(rate / slots);
            out.pair_outage[m].push(missed / slots);
        }
    }
    Ok(out)
}

fn power_for(link: Link, snr_db: f64) -> Result<f64> {
    if !snr_db.is_finite() {
        return Err(Error::param("snr_db", format!("must be finite, got {snr_db} ({link:?})")));
    }
    Ok(db_to_linear(snr_db))
}

/// Sum ergodic communication rate over all pairs. `snr_db` sets the downlink
/// power or the uplink communication power.
pub fn estimate_ecr(
    link: Link,
    design: Design,
    scenario: &Scenario,
    snr_db: f64,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    let p = power_for(link, snr_db)?;
    Ok(match link {
        Link::Downlink => {
            let s = simulate_downlink(scenario, design, p, trials, seed)?;
            MonteCarloEstimate::from_samples(&s.sum_rate(), s.discarded)
        }
        Link::Uplink => {
            let s = simulate_uplink(scenario, design, p, trials, seed)?;
            MonteCarloEstimate::from_samples(&s.sum_rate(), s.discarded)
        }
    })
}

/// Outage frequencies against the configured targets: downlink in the order
/// `[pair 0 near, pair 0 far, pair 1 near, ...]`, uplink one per pair.
pub fn estimate_op(
    link: Link,
    design: Design,
    scenario: &Scenario,
    snr_db: f64,
    trials: u64,
    seed: u64,
) -> Result<Vec<MonteCarloEstimate>> {
    let p = power_for(link, snr_db)?;
    Ok(match link {
        Link::Downlink => {
            let s = simulate_downlink(scenario, design, p, trials, seed)?;
            (0..scenario.config.pairs.len())
                .flat_map(|m| {
                    let (near, far) = s.outage(&scenario.config, m);
                    [
                        MonteCarloEstimate::from_indicators(&near, s.discarded),
                        MonteCarloEstimate::from_indicators(&far, s.discarded),
                    ]
                })
                .collect()
        }
        Link::Uplink => {
            let s = simulate_uplink(scenario, design, p, trials, seed)?;
            s.pair_outage.iter().map(|o| MonteCarloEstimate::from_indicators(o, s.discarded)).collect()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_statistics() {
        let e = MonteCarloEstimate::from_samples(&[1.0, 2.0, 3.0, 4.0], 0);
        assert_eq!(e.mean, 2.5);
        assert!((e.stderr - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
        assert!(!e.flagged());
        assert!(MonteCarloEstimate::from_samples(&[1.0; 999], 1).flagged());
    }

    #[test]
    fn outcome_statistics() {
        let e = MonteCarloEstimate::from_outcomes(500, 1000, 0);
        assert!((e.stderr - (0.25f64 / 1000.0).sqrt()).abs() < 1e-15);
        let rare = MonteCarloEstimate::from_outcomes(0, 1000, 0);
        assert_eq!(rare.mean, 0.0);
        assert!(rare.stderr > 0.0);
        assert!(rare.z_score(0.0).abs() < 1e-12);
    }

    #[test]
    fn z_score_handles_zero_spread() {
        let e = MonteCarloEstimate { mean: 1.0, stderr: 0.0, trials: 5, discarded: 0 };
        assert_eq!(e.z_score(1.0), 0.0);
        assert!(e.z_score(0.5).is_infinite());
    }
}
