//! Rate-profile (Pareto) designs between the sensing- and
//! communications-centric extremes.
//!
//! For a profile `ρ` we maximise `R` subject to `SR ≥ ρR` and `ECR ≥ (1-ρ)R`,
//! with the ergodic rate taken as the mean over a fixed batch of realizations
//! and powers chosen per realization. The achievable (SR, ECR) set is convex,
//! so the optimum is the weighted-sum point
//! `max (w/ρ)·SR + ((1-w)/(1-ρ))·ECR` whose weight balances `SR/ρ = ECR/(1-ρ)`.
//! Each weight needs one concave KKT solve per realization; the weight itself
//! is found by regula falsi.

use rayon::prelude::*;
use std::f64::consts::LN_2;

use crate::channel::{SensingCorrelation, SystemConfig};
use crate::error::{Error, Result};
use crate::mathkit::{maximize_separable, SeparableConcave};

use super::cc::{comm_allocation, CommUtility, DownlinkBatch};
use super::sensing::{eigen_sensing_rate, sc_design};

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoPoint {
    pub rho: f64,
    /// Batch-mean sensing rate.
    pub sensing_rate: f64,
    /// Batch-mean sum communication rate.
    pub comm_rate: f64,
    /// Weight `w` on the sensing term at the optimum.
    pub weight: f64,
    pub batch_size: usize,
    /// Powers per realization, in batch order.
    pub powers: Vec<Vec<f64>>,
}

impl ParetoPoint {
    /// `min(SR/ρ, ECR/(1-ρ))`.
    pub fn profile_rate(&self) -> f64 {
        if self.rho == 0.0 {
            self.comm_rate
        } else if self.rho == 1.0 {
            self.sensing_rate
        } else {
            (self.sensing_rate / self.rho).min(self.comm_rate / (1.0 - self.rho))
        }
    }
}

struct Weighted<'a> {
    sens_gains: &'a [f64],
    sens_scale: f64,
    comm: CommUtility<'a>,
    w_sens: f64,
    w_comm: f64,
}

impl SeparableConcave for Weighted<'_> {
    fn dim(&self) -> usize {
        self.sens_gains.len()
    }

    fn value(&self, m: usize, x: f64) -> f64 {
        let g = self.sens_gains[m];
        self.w_sens * self.sens_scale * (g * x).ln_1p() / LN_2 + self.w_comm * self.comm.value(m, x)
    }

    fn slope(&self, m: usize, x: f64) -> f64 {
        let g = self.sens_gains[m];
        self.w_sens * self.sens_scale * g / ((1.0 + g * x) * LN_2) + self.w_comm * self.comm.slope(m, x)
    }

    fn curvature(&self, m: usize, x: f64) -> f64 {
        let t = self.sens_gains[m] / (1.0 + self.sens_gains[m] * x);
        -self.w_sens * self.sens_scale * t * t / LN_2 + self.w_comm * self.comm.curvature(m, x)
    }
}

struct Evaluation {
    sr: f64,
    cr: f64,
    powers: Vec<Vec<f64>>,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn evaluate(config: &SystemConfig, corr: &SensingCorrelation, batch: &DownlinkBatch, p: f64, rho: f64, w: f64) -> Evaluation {
    let l = config.frame_len;
    let eig = corr.eigenvalues();
    let sens_gains: Vec<f64> = eig.iter().map(|lam| l as f64 * lam).collect();
    let sc_powers = if w == 1.0 { Some(sc_design(corr, p, l).expect("valid power").powers) } else { None };
    let per: Vec<(f64, f64, Vec<f64>)> = batch
        .gains
        .par_iter()
        .map(|gains| {
            let comm = CommUtility { pairs: &config.pairs, gains, kappa: 1.0 };
            let powers = if let Some(sc) = &sc_powers {
                sc.clone()
            } else if w == 0.0 {
                comm_allocation(&config.pairs, gains, p, 1.0).allocation
            } else {
                let problem = Weighted {
                    sens_gains: &sens_gains,
                    sens_scale: eig.len() as f64 / l as f64,
                    comm: CommUtility { pairs: &config.pairs, gains, kappa: 1.0 },
                    w_sens: w / rho,
                    w_comm: (1.0 - w) / (1.0 - rho),
                };
                maximize_separable(&problem, p).allocation
            };
            (eigen_sensing_rate(eig, &powers, l, 0.0), comm.rate(&powers), powers)
        })
        .collect();
    let sr: Vec<f64> = per.iter().map(|t| t.0).collect();
    let cr: Vec<f64> = per.iter().map(|t| t.1).collect();
    Evaluation { sr: mean(&sr), cr: mean(&cr), powers: per.into_iter().map(|t| t.2).collect() }
}

pub fn pareto_design(
    config: &SystemConfig,
    corr: &SensingCorrelation,
    batch: &DownlinkBatch,
    p: f64,
    rho: f64,
) -> Result<ParetoPoint> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::param("rho", format!("must lie in [0, 1], got {rho}")));
    }
    if batch.is_empty() {
        return Err(Error::param("batch", "needs at least one realization"));
    }
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::param("p", "power must be finite and >= 0"));
    }
    let finish = |w: f64, e: Evaluation| ParetoPoint {
        rho,
        sensing_rate: e.sr,
        comm_rate: e.cr,
        weight: w,
        batch_size: batch.len(),
        powers: e.powers,
    };
    if rho == 1.0 || rho == 0.0 {
        return Ok(finish(rho, evaluate(config, corr, batch, p, rho, rho)));
    }

    let balance = |e: &Evaluation| e.sr / rho - e.cr / (1.0 - rho);
    let lo_eval = evaluate(config, corr, batch, p, rho, 0.0);
    let mut f_lo = balance(&lo_eval);
    if f_lo >= 0.0 {
        return Ok(finish(0.0, lo_eval));
    }
    let hi_eval = evaluate(config, corr, batch, p, rho, 1.0);
    let mut f_hi = balance(&hi_eval);
    if f_hi <= 0.0 {
        return Ok(finish(1.0, hi_eval));
    }

    let scale = (hi_eval.sr / rho).max(lo_eval.cr / (1.0 - rho));
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut best = (0.0, lo_eval);
    let mut side = 0i8;
    for _ in 0..100 {
        let mut w = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(w > lo && w < hi) {
            w = 0.5 * (lo + hi);
        }
        let e = evaluate(config, corr, batch, p, rho, w);
        let f = balance(&e);
        best = (w, e);
        if f.abs() <= 1e-11 * scale || hi - lo <= 1e-14 {
            break;
        }
        // Illinois modification keeps both ends moving.
        if f < 0.0 {
            lo = w;
            f_lo = f;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = w;
            f_hi = f;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(finish(best.0, best.1))
}
