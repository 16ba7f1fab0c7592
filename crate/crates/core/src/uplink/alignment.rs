//! Uplink signal-alignment precoders and zero-forcing detection.

use nalgebra::SVD;
use rand::Rng;
use rayon::prelude::*;

use crate::channel::{sample_uplink, stream_rng, Stream, SystemConfig, UplinkPairChannel, UplinkRealization};
use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian_vector, inverse_with_condition, squared_norm, CMat, CVec, C64};

/// Relative singular-value threshold for the null space.
const NULL_TOL: f64 = 1e-9;
const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct UplinkPrecoders {
    pub w_near: CVec,
    pub w_far: CVec,
    /// `2N×(2N-M)` orthonormal basis of the null space of `[H_near, -H_far]`.
    pub null_basis: CMat,
    /// Combining weights on the null basis, `‖r‖² = 2`.
    pub combiner: CVec,
}

impl UplinkPrecoders {
    /// `H_near w_near`, the common effective channel of the pair.
    pub fn effective_channel(&self, channel: &UplinkPairChannel) -> CVec {
        &channel.h_near * &self.w_near
    }
}

/// Builds aligned precoders for one pair with a random combiner drawn from `rng`.
pub fn build_precoders<R: Rng + ?Sized>(channel: &UplinkPairChannel, rng: &mut R) -> Result<UplinkPrecoders> {
    let (m, n) = channel.h_near.shape();
    let width = 2 * n;
    if width <= m {
        return Err(Error::param("N", "uplink alignment needs 2N > M"));
    }
    // Zero rows below [H_near, -H_far] keep its right singular vectors and
    // make the decomposition return a full 2N×2N basis.
    let mut a = CMat::zeros(width, width);
    a.view_mut((0, 0), (m, n)).copy_from(&channel.h_near);
    a.view_mut((0, n), (m, n)).copy_from(&(-&channel.h_far));
    let svd = SVD::new(a, false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Degenerate("SVD did not converge".into()))?;
    let sigma = &svd.singular_values;
    let largest = sigma.iter().copied().fold(0.0, f64::max);
    let null: Vec<usize> = (0..width).filter(|&i| sigma[i] <= NULL_TOL * largest).collect();
    if null.len() != width - m {
        return Err(Error::Degenerate(format!(
            "expected {} null directions, found {}",
            width - m,
            null.len()
        )));
    }
    let null_basis = CMat::from_fn(width, null.len(), |r, c| v_t[(null[c], r)].conj());

    let mut combiner = complex_gaussian_vector(rng, null.len());
    let norm = squared_norm(&combiner).sqrt();
    combiner *= C64::new(std::f64::consts::SQRT_2 / norm, 0.0);
    let stacked = &null_basis * &combiner;
    Ok(UplinkPrecoders {
        w_near: stacked.rows(0, n).into_owned(),
        w_far: stacked.rows(n, n).into_owned(),
        null_basis,
        combiner,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UplinkDetection {
    /// Rows are the aligned effective channels `z_m^H`.
    pub q: CMat,
    /// Unit-norm zero-forcing columns `Q^{-1} D`.
    pub v: CMat,
    /// `1/(Q^{-H} Q^{-1})_{mm}`.
    pub inv_gains: Vec<f64>,
}

pub fn build_detection(precoders: &[UplinkPrecoders], realization: &UplinkRealization) -> Result<UplinkDetection> {
    let dim = precoders.len();
    let mut q = CMat::zeros(dim, dim);
    for (m, (pre, ch)) in precoders.iter().zip(&realization.pairs).enumerate() {
        let z = pre.effective_channel(ch);
        if z.len() != dim {
            return Err(Error::param("precoders", "one pair per BS antenna required"));
        }
        q.row_mut(m).copy_from(&z.adjoint());
    }
    let (q_inv, cond) =
        inverse_with_condition(&q).ok_or_else(|| Error::Degenerate("singular uplink effective channel".into()))?;
    if cond > MAX_CONDITION {
        return Err(Error::Degenerate(format!("uplink effective channel condition {cond:.3e}")));
    }
    let mut v = q_inv.clone();
    let mut inv_gains = Vec::with_capacity(dim);
    for j in 0..dim {
        let norm2: f64 = q_inv.column(j).iter().map(|z| z.norm_sqr()).sum();
        inv_gains.push(1.0 / norm2);
        let mut col = v.column_mut(j);
        col *= C64::new(1.0 / norm2.sqrt(), 0.0);
    }
    Ok(UplinkDetection { q, v, inv_gains })
}

/// Precoders and detection for one realization; combiners come from the
/// trial's own stream.
pub fn align_realization(
    realization: &UplinkRealization,
    seed: u64,
    trial: u64,
) -> Result<(Vec<UplinkPrecoders>, UplinkDetection)> {
    let mut rng = stream_rng(seed, trial, Stream::Combiner);
    let precoders =
        realization.pairs.iter().map(|ch| build_precoders(ch, &mut rng)).collect::<Result<Vec<_>>>()?;
    let detection = build_detection(&precoders, realization)?;
    Ok((precoders, detection))
}

/// Post-detection gains for a batch of uplink realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct UplinkBatch {
    pub inv_gains: Vec<Vec<f64>>,
    pub discarded: usize,
}

impl UplinkBatch {
    pub fn sample(config: &SystemConfig, seed: u64, trials: u64) -> Self {
        let drawn: Vec<Option<Vec<f64>>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let real = sample_uplink(config, seed, t);
                align_realization(&real, seed, t).ok().map(|(_, det)| det.inv_gains)
            })
            .collect();
        let discarded = drawn.iter().filter(|d| d.is_none()).count();
        Self { inv_gains: drawn.into_iter().flatten().collect(), discarded }
    }

    pub fn len(&self) -> usize {
        self.inv_gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_gains.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;

    #[test]
    fn identity_effective_channel() {
        let pre: Vec<UplinkPrecoders> = (0..3)
            .map(|m| {
                let mut e = CVec::zeros(3);
                e[m] = C64::new(1.0, 0.0);
                UplinkPrecoders { w_near: e.clone(), w_far: e, null_basis: CMat::zeros(6, 3), combiner: CVec::zeros(3) }
            })
            .collect();
        let real = UplinkRealization {
            pairs: (0..3).map(|_| UplinkPairChannel { h_near: identity(3), h_far: identity(3) }).collect(),
        };
        let det = build_detection(&pre, &real).unwrap();
        assert!((&det.v - identity(3)).iter().all(|z| z.norm() < 1e-15));
        assert!(det.inv_gains.iter().all(|g| (g - 1.0).abs() < 1e-15));
    }
}
