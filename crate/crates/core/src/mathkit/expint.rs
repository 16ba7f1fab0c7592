//! Exponential integral on the negative axis.
//!
//! `Ei(-y) = -E1(y)` for `y > 0`. Small `y` uses the convergent series, larger
//! `y` the continued fraction for `e^y E1(y)`, which never overflows.

use crate::error::{Error, Result};
use std::f64::consts::LN_2;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// Series and continued fraction agree to ~1e-15 around here. Above it the
// alternating series loses digits to cancellation.
const SERIES_LIMIT: f64 = 1.0;

fn e1_series(y: f64) -> f64 {
    // E1(y) = -C - ln y - sum_{k>=1} (-y)^k / (k k!)
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        let k = k as f64;
        term *= -y / k;
        let c = term / k;
        sum += c;
        if c.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - y.ln() - sum
}

fn scaled_e1_fraction(y: f64) -> f64 {
    // Modified Lentz on e^y E1(y) = 1/(y+1- 1/(y+3- 4/(y+5- ...)))
    const TINY: f64 = 1e-300;
    let mut b = y + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// `e^y E1(y)` for `y > 0`; tends to `1/y` as `y` grows.
pub fn scaled_e1(y: f64) -> f64 {
    if y.is_infinite() {
        0.0
    } else if y <= SERIES_LIMIT {
        y.exp() * e1_series(y)
    } else {
        scaled_e1_fraction(y)
    }
}

/// Exponential integral `Ei(x) = ∫_{-∞}^{x} e^t/t dt` for `x < 0`.
pub fn expint_ei(x: f64) -> Result<f64> {
    if x.is_nan() || x >= 0.0 {
        return Err(Error::domain("expint_ei", format!("requires x < 0, got {x}")));
    }
    let y = -x;
    let e1 = if y <= SERIES_LIMIT { e1_series(y) } else { scaled_e1_fraction(y) * (-y).exp() };
    Ok(-e1)
}

/// `E{log2(1 + a X)}` for `X ~ Exp(1)`, i.e. `-(1/ln 2) e^{1/a} Ei(-1/a)`.
pub fn rate_integral_exp(a: f64) -> Result<f64> {
    if a.is_nan() || a <= 0.0 {
        return Err(Error::domain("rate_integral_exp", format!("requires a > 0, got {a}")));
    }
    Ok(scaled_e1(1.0 / a) / LN_2)
}

/// Same as [`rate_integral_exp`] but maps `a = 0` to zero rate.
pub(crate) fn rate_integral_exp0(a: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        rate_integral_exp(a).expect("rate_integral_exp0 needs a >= 0")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonnegative_arguments() {
        assert!(expint_ei(0.0).is_err());
        assert!(expint_ei(2.0).is_err());
        assert!(expint_ei(f64::NAN).is_err());
        assert!(rate_integral_exp(0.0).is_err());
        assert!(rate_integral_exp(-1.0).is_err());
    }

    #[test]
    fn series_and_fraction_agree_near_switch() {
        for &y in &[0.8f64, 0.9, 1.0, 1.1, 1.5, 2.0] {
            let s = y.exp() * e1_series(y);
            let f = scaled_e1_fraction(y);
            assert!((s - f).abs() <= 1e-13 * f, "y={y}: {s} vs {f}");
        }
    }

    #[test]
    fn large_argument_tends_to_reciprocal() {
        let y = 1e8;
        assert!((scaled_e1(y) * y - 1.0).abs() < 1e-7);
        assert_eq!(scaled_e1(f64::INFINITY), 0.0);
    }

    #[test]
    fn zero_gain_rate_is_zero() {
        assert_eq!(rate_integral_exp0(0.0), 0.0);
        assert!(rate_integral_exp(1e-300).unwrap() < 1e-290);
    }
}
