//! Curve fits and distribution tests.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

fn least_squares(x: &[f64], y: &[f64]) -> Result<SlopeFit> {
    if x.len() != y.len() {
        return Err(Error::param("curve", format!("{} abscissae vs {} values", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::param("curve", "need at least two points"));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::param("curve", "values must be finite"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::param("snr_grid_db", "needs at least two distinct points"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(SlopeFit { slope, intercept: my - slope * mx, r_squared })
}

fn log2_power(snr_db: &[f64]) -> Vec<f64> {
    snr_db.iter().map(|d| d / 10.0 * std::f64::consts::LOG2_10).collect()
}

/// Least-squares slope of `values` against `log2 p`, with `p` in dB.
pub fn estimate_slope(snr_db: &[f64], values: &[f64]) -> Result<SlopeFit> {
    least_squares(&log2_power(snr_db), values)
}

/// Negated log-log slope of an outage curve.
pub fn estimate_diversity(snr_db: &[f64], op: &[f64]) -> Result<SlopeFit> {
    if op.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::param("op", "outage probabilities must be positive"));
    }
    let logs: Vec<f64> = op.iter().map(|v| v.log2()).collect();
    let fit = least_squares(&log2_power(snr_db), &logs)?;
    Ok(SlopeFit { slope: -fit.slope, ..fit })
}

/// Kolmogorov-Smirnov distance between the empirical law of `samples` and Exp(1).
pub fn ks_exponential_test(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::param("samples", "empty sample"));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::param("samples", "NaN sample"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let cdf = if x <= 0.0 { 0.0 } else { -(-x).exp_m1() };
        d = d.max((i + 1) as f64 / n - cdf).max(cdf - i as f64 / n);
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Exp};

    #[test]
    fn affine_curve_recovered() {
        let snr = [50.0, 55.0, 60.0];
        let vals: Vec<f64> = snr.iter().map(|d| 0.5 * d / 10.0 * std::f64::consts::LOG2_10 - 3.0).collect();
        let fit = estimate_slope(&snr, &vals).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!((fit.intercept + 3.0).abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_law_diversity() {
        let snr = [20.0, 25.0, 30.0];
        let op: Vec<f64> = snr.iter().map(|d| 3.0 * 10f64.powf(-d / 10.0)).collect();
        assert!((estimate_diversity(&snr, &op).unwrap().slope - 1.0).abs() < 1e-6);
        assert!(estimate_diversity(&snr, &[0.1, 0.0, 0.01]).is_err());
    }

    #[test]
    fn ks_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let unit: Vec<f64> = Exp::new(1.0).unwrap().sample_iter(&mut rng).take(100_000).collect();
        assert!(ks_exponential_test(&unit).unwrap() < 0.005);
        let slow: Vec<f64> = Exp::new(0.5).unwrap().sample_iter(&mut rng).take(100_000).collect();
        assert!(ks_exponential_test(&slow).unwrap() > 0.1);
    }

    #[test]
    fn degenerate_grids_rejected() {
        assert!(estimate_slope(&[10.0], &[1.0]).is_err());
        assert!(estimate_slope(&[10.0, 10.0], &[1.0, 2.0]).is_err());
        assert!(ks_exponential_test(&[]).is_err());
    }
}
