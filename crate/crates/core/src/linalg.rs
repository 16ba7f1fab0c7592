//! Complex matrix helpers on top of nalgebra.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Draws one CN(0, 1) sample.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    // Column-major fill so draws are consumed in a fixed order.
    let mut m = CMat::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

pub fn complex_gaussian_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> CVec {
    CVec::from_fn(len, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary via QR of a Gaussian matrix with phase fix-up.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMat {
    let z = complex_gaussian_matrix(rng, dim, dim);
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `U diag(d) U^H`.
pub fn unitary_congruence(u: &CMat, d: &[f64]) -> CMat {
    let mut scaled = u.clone();
    for (j, &dj) in d.iter().enumerate() {
        let mut col = scaled.column_mut(j);
        col *= C64::new(dj, 0.0);
    }
    &scaled * u.adjoint()
}

/// `log2 det(K)` for Hermitian positive definite `K`.
pub fn log2_det_hpd(k: &CMat) -> Option<f64> {
    let chol = k.clone().cholesky()?;
    let l = chol.l_dirty();
    Some(2.0 * (0..k.nrows()).map(|i| l[(i, i)].re.ln()).sum::<f64>() / std::f64::consts::LN_2)
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn squared_norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

/// Inverse together with the Frobenius condition estimate `‖A‖_F ‖A^{-1}‖_F`.
pub fn inverse_with_condition(a: &CMat) -> Option<(CMat, f64)> {
    let inv = a.clone().try_inverse()?;
    let cond = frobenius(a) * frobenius(&inv);
    cond.is_finite().then_some((inv, cond))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = haar_unitary(&mut rng, 5);
        let e = &u.adjoint() * &u - identity(5);
        assert!(frobenius(&e) < 1e-12);
    }

    #[test]
    fn eigen_roundtrip_sorted() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = complex_gaussian_matrix(&mut rng, 4, 4);
        let h = &g * g.adjoint();
        let (vals, vecs) = hermitian_eigen(&h);
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        assert!(frobenius(&(unitary_congruence(&vecs, &vals) - &h)) < 1e-10);
    }

    #[test]
    fn logdet_matches_eigenvalues() {
        let u = haar_unitary(&mut ChaCha8Rng::seed_from_u64(5), 3);
        let k = unitary_congruence(&u, &[4.0, 2.0, 0.5]);
        assert!((log2_det_hpd(&k).unwrap() - 2.0).abs() < 1e-12);
    }
}
