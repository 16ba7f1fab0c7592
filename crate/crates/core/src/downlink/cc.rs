//! Communications-centric power allocation and realization batches.

use rayon::prelude::*;
use std::f64::consts::LN_2;

use crate::channel::{sample_downlink, PairConfig, SensingCorrelation, SystemConfig};
use crate::mathkit::{maximize_separable, KktSolution, SeparableConcave};

use super::detection::{detect_all, PairGains};
use super::rates::instantaneous_rates;
use super::sensing::{DesignSolution, DesignTag};

/// Post-detection gains for a batch of independent downlink realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct DownlinkBatch {
    /// One entry per accepted realization, one gain pair per NOMA pair.
    pub gains: Vec<Vec<PairGains>>,
    /// Trial indices of the accepted realizations.
    pub trials: Vec<u64>,
    /// Realizations rejected as numerically degenerate.
    pub discarded: usize,
}

impl DownlinkBatch {
    /// Draws trials `0..trials` of `seed` and keeps the well-conditioned ones.
    pub fn sample(config: &SystemConfig, corr: &SensingCorrelation, seed: u64, trials: u64) -> Self {
        let drawn: Vec<Option<Vec<PairGains>>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let real = sample_downlink(config, seed, t);
                let det = detect_all(&real, corr).ok()?;
                Some(det.iter().zip(&config.pairs).map(|(d, pair)| d.gains(pair)).collect())
            })
            .collect();
        let mut batch = Self { gains: Vec::new(), trials: Vec::new(), discarded: 0 };
        for (t, g) in drawn.into_iter().enumerate() {
            match g {
                Some(g) => {
                    batch.gains.push(g);
                    batch.trials.push(t as u64);
                }
                None => batch.discarded += 1,
            }
        }
        batch
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }
}

/// Sum of the pair rates over a fraction `kappa` of the band, i.e. with noise
/// scaled by `kappa`: `κ Σ_m [log2(1 + a c/κ) + log2(1 + (α_n+α_f) g c/κ) - log2(1 + α_n g c/κ)]`.
pub(crate) struct CommUtility<'a> {
    pub pairs: &'a [PairConfig],
    pub gains: &'a [PairGains],
    pub kappa: f64,
}

impl CommUtility<'_> {
    fn coefficients(&self, m: usize) -> (f64, f64, f64) {
        let (pair, g) = (&self.pairs[m], &self.gains[m]);
        let near = pair.alpha_near * g.near / self.kappa;
        let total = (pair.alpha_near + pair.alpha_far) * g.far / self.kappa;
        let interference = pair.alpha_near * g.far / self.kappa;
        (near, total, interference)
    }

    /// Achieved rates: `κ Σ (R_near + R_far)` with gains scaled by `1/κ`.
    pub fn rate(&self, powers: &[f64]) -> f64 {
        if self.kappa == 0.0 {
            return 0.0;
        }
        let sum: f64 = (0..self.pairs.len())
            .map(|m| {
                let g = PairGains { near: self.gains[m].near / self.kappa, far: self.gains[m].far / self.kappa };
                let (n, f) = instantaneous_rates(&self.pairs[m], g, powers[m]);
                n + f
            })
            .sum();
        self.kappa * sum
    }
}

impl SeparableConcave for CommUtility<'_> {
    fn dim(&self) -> usize {
        self.pairs.len()
    }

    fn value(&self, m: usize, x: f64) -> f64 {
        let (a, s, i) = self.coefficients(m);
        self.kappa * ((a * x).ln_1p() + (s * x).ln_1p() - (i * x).ln_1p()) / LN_2
    }

    fn slope(&self, m: usize, x: f64) -> f64 {
        let (a, s, i) = self.coefficients(m);
        self.kappa * (a / (1.0 + a * x) + s / (1.0 + s * x) - i / (1.0 + i * x)) / LN_2
    }

    fn curvature(&self, m: usize, x: f64) -> f64 {
        let (a, s, i) = self.coefficients(m);
        let sq = |c: f64| {
            let t = c / (1.0 + c * x);
            t * t
        };
        -self.kappa * (sq(a) + sq(s) - sq(i)) / LN_2
    }
}

/// Best communication powers over a fraction `kappa` of the band.
pub(crate) fn comm_allocation(pairs: &[PairConfig], gains: &[PairGains], budget: f64, kappa: f64) -> KktSolution {
    if kappa == 0.0 {
        return KktSolution { allocation: vec![0.0; pairs.len()], multiplier: 0.0, objective: 0.0 };
    }
    maximize_separable(&CommUtility { pairs, gains, kappa }, budget)
}

/// Instantaneous sum rate of all pairs at the given powers.
pub fn comm_sum_rate(pairs: &[PairConfig], gains: &[PairGains], powers: &[f64]) -> f64 {
    comm_rate_in_band(pairs, gains, powers, 1.0)
}

pub(crate) fn comm_rate_in_band(pairs: &[PairConfig], gains: &[PairGains], powers: &[f64], kappa: f64) -> f64 {
    CommUtility { pairs, gains, kappa }.rate(powers)
}

/// Powers maximising the instantaneous sum rate of one realization.
pub fn cc_design(config: &SystemConfig, corr: &SensingCorrelation, gains: &[PairGains], p: f64) -> DesignSolution {
    let sol = comm_allocation(&config.pairs, gains, p, 1.0);
    DesignSolution {
        precoders: corr.eigenvectors().clone(),
        powers: sol.allocation,
        tag: DesignTag::CommunicationsCentric,
    }
}
