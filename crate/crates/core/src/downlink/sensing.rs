//! Downlink sensing rate and the sensing-centric design.

use crate::channel::SensingCorrelation;
use crate::error::{Error, Result};
use crate::linalg::{identity, inverse_with_condition, log2_det_hpd, CMat, C64};
use crate::mathkit::water_fill;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DesignTag {
    SensingCentric,
    CommunicationsCentric,
    Pareto { rho: f64 },
    Fdsac { kappa: f64, mu: f64 },
}

impl DesignTag {
    pub fn label(&self) -> String {
        match self {
            DesignTag::SensingCentric => "sc".into(),
            DesignTag::CommunicationsCentric => "cc".into(),
            DesignTag::Pareto { rho } => format!("pareto_rho={rho:.2}"),
            DesignTag::Fdsac { kappa, mu } => format!("fdsac_kappa={kappa:.2}_mu={mu:.2}"),
        }
    }
}

/// Unit-norm precoder directions plus per-direction powers.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSolution {
    pub precoders: CMat,
    pub powers: Vec<f64>,
    pub tag: DesignTag,
}

impl DesignSolution {
    /// `P = W diag(√powers)`.
    pub fn precoder(&self) -> CMat {
        let mut p = self.precoders.clone();
        for (j, &s) in self.powers.iter().enumerate() {
            let mut col = p.column_mut(j);
            col *= C64::new(s.sqrt(), 0.0);
        }
        p
    }
}

/// `(M/L) log2 det(I + L P^H R P)`.
pub fn sr_given_precoder(precoder: &CMat, corr: &SensingCorrelation, frame_len: usize) -> Result<f64> {
    let m = corr.dim();
    if precoder.nrows() != m {
        return Err(Error::param("precoder", format!("expected {m} rows, got {}", precoder.nrows())));
    }
    if precoder.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::param("precoder", "entries must be finite"));
    }
    let l = frame_len as f64;
    let k = identity(precoder.ncols()) + precoder.adjoint() * corr.matrix() * precoder * C64::new(l, 0.0);
    let k = (&k + k.adjoint()) * C64::new(0.5, 0.0);
    let logdet = log2_det_hpd(&k).ok_or_else(|| Error::param("precoder", "I + L P^H R P is not positive definite"))?;
    Ok(m as f64 / l * logdet)
}

/// Estimation error of the target response, `M tr((L P P^H + R^{-1})^{-1})`.
pub fn sensing_mse(precoder: &CMat, corr: &SensingCorrelation, frame_len: usize) -> Result<f64> {
    let m = corr.dim();
    if precoder.nrows() != m {
        return Err(Error::param("precoder", format!("expected {m} rows, got {}", precoder.nrows())));
    }
    let (r_inv, _) =
        inverse_with_condition(corr.matrix()).ok_or_else(|| Error::param("corr", "correlation must be invertible"))?;
    let a = precoder * precoder.adjoint() * C64::new(frame_len as f64, 0.0) + r_inv;
    let (inv, _) = inverse_with_condition(&a).ok_or_else(|| Error::param("precoder", "singular error covariance"))?;
    Ok(m as f64 * inv.trace().re)
}

/// Sensing rate on the eigenbasis with a fraction `1 - kappa` of the band:
/// `(M(1-κ)/L) Σ log2(1 + L λ_m a_m / (1-κ))`.
pub(crate) fn eigen_sensing_rate(eigenvalues: &[f64], powers: &[f64], frame_len: usize, kappa: f64) -> f64 {
    let band = 1.0 - kappa;
    if band <= 0.0 {
        return 0.0;
    }
    let l = frame_len as f64;
    let m = eigenvalues.len() as f64;
    let sum: f64 = eigenvalues.iter().zip(powers).map(|(lam, a)| (l * lam / band * a).ln_1p()).sum();
    m * band / l * sum / std::f64::consts::LN_2
}

/// `(M/L) Σ log2(1 + L λ_m c_m)` for powers on the eigenbasis.
pub fn sr_cc(powers: &[f64], corr: &SensingCorrelation, frame_len: usize) -> f64 {
    eigen_sensing_rate(corr.eigenvalues(), powers, frame_len, 0.0)
}

/// Water-filling over gains `L λ_m`.
pub fn sc_design(corr: &SensingCorrelation, p: f64, frame_len: usize) -> Result<DesignSolution> {
    let gains: Vec<f64> = corr.eigenvalues().iter().map(|l| frame_len as f64 * l).collect();
    let wf = water_fill(&gains, p)?;
    Ok(DesignSolution { precoders: corr.eigenvectors().clone(), powers: wf.allocation, tag: DesignTag::SensingCentric })
}

impl DesignSolution {
    /// Sensing rate of an eigenbasis design.
    pub fn sensing_rate(&self, corr: &SensingCorrelation, frame_len: usize) -> f64 {
        sr_cc(&self.powers, corr, frame_len)
    }
}

/// High-SNR sensing rate `(M²/L)(log2 p + (1/M) Σ log2(L λ_m / M))`.
pub fn sr_sc_asymptotic(corr: &SensingCorrelation, p: f64, frame_len: usize) -> f64 {
    let m = corr.dim() as f64;
    let l = frame_len as f64;
    let offset: f64 = corr.eigenvalues().iter().map(|lam| (l * lam / m).log2()).sum::<f64>() / m;
    m * m / l * (p.log2() + offset)
}
