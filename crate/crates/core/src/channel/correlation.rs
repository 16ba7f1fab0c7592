//! Sensing correlation matrix of the target response rows.

use crate::error::{Error, Result};
use crate::linalg::{frobenius, haar_unitary, hermitian_eigen, unitary_congruence, CMat, C64};

use super::sampling::{stream_rng, Stream};

#[derive(Debug, Clone, PartialEq)]
pub struct SensingCorrelation {
    matrix: CMat,
    eigenvalues: Vec<f64>,
    eigenvectors: CMat,
}

/// Point targets seen by a half-wavelength ULA.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetScene {
    pub rcs_vars: Vec<f64>,
    pub angles: Vec<f64>,
}

impl SensingCorrelation {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Columns are the eigenvectors matching [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &CMat {
        &self.eigenvectors
    }

    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    /// Principal square root.
    pub fn sqrt(&self) -> CMat {
        let roots: Vec<f64> = self.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
        unitary_congruence(&self.eigenvectors, &roots)
    }

    pub fn reconstruction_residual(&self) -> f64 {
        frobenius(&(unitary_congruence(&self.eigenvectors, &self.eigenvalues) - &self.matrix))
    }
}

/// `R = Σ_k σ_k² conj(b(θ_k)) b(θ_k)^T` with `b(θ)_m = e^{jπ(m-1) sin θ}`.
pub fn correlation_from_targets(scene: &TargetScene, dim: usize) -> Result<SensingCorrelation> {
    if dim < 1 {
        return Err(Error::param("M", "array size must be positive"));
    }
    if scene.rcs_vars.is_empty() || scene.rcs_vars.len() != scene.angles.len() {
        return Err(Error::param("scene", "need equal, nonzero numbers of RCS variances and angles"));
    }
    if scene.rcs_vars.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::param("scene.rcs_vars", "variances must be positive"));
    }
    let mut matrix = CMat::zeros(dim, dim);
    for (&var, &theta) in scene.rcs_vars.iter().zip(&scene.angles) {
        let phase = std::f64::consts::PI * theta.sin();
        for i in 0..dim {
            for j in 0..dim {
                matrix[(i, j)] += C64::from_polar(var, phase * (j as f64 - i as f64));
            }
        }
    }
    let (eigenvalues, eigenvectors) = hermitian_eigen(&matrix);
    Ok(SensingCorrelation { matrix, eigenvalues, eigenvectors })
}

/// `R = U diag(λ) U^H` with a Haar unitary `U` drawn from `seed`.
pub fn correlation_from_eigenvalues(eigenvalues: &[f64], seed: u64) -> Result<SensingCorrelation> {
    if eigenvalues.is_empty() {
        return Err(Error::param("eigenvalues", "need at least one eigenvalue"));
    }
    if eigenvalues.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
        return Err(Error::param("eigenvalues", "eigenvalues must be positive and finite"));
    }
    let dim = eigenvalues.len();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]));
    let sorted: Vec<f64> = order.iter().map(|&i| eigenvalues[i]).collect();
    let mut rng = stream_rng(seed, 0, Stream::Eigenbasis);
    let eigenvectors = haar_unitary(&mut rng, dim);
    let mut matrix = unitary_congruence(&eigenvectors, &sorted);
    // Enforce exact Hermitian symmetry.
    matrix = (&matrix + matrix.adjoint()) * C64::new(0.5, 0.0);
    Ok(SensingCorrelation { matrix, eigenvalues: sorted, eigenvectors })
}
