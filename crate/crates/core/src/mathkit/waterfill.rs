//! Water-filling over parallel channels.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WaterFillSolution {
    pub allocation: Vec<f64>,
    /// Lagrange multiplier ν; the water level is `1/ν`.
    pub multiplier: f64,
    /// `Σ log2(1 + gain·s)`.
    pub objective: f64,
    /// Set when the budget is positive but every gain is zero.
    pub degenerate: bool,
}

impl WaterFillSolution {
    pub fn water_level(&self) -> f64 {
        1.0 / self.multiplier
    }

    /// Largest violation of the KKT conditions (budget and complementarity).
    pub fn kkt_residual(&self, gains: &[f64], budget: f64) -> f64 {
        if self.degenerate || budget == 0.0 {
            return self.allocation.iter().map(|s| s.abs()).fold(0.0, f64::max);
        }
        let level = self.water_level();
        let mut worst = (self.allocation.iter().sum::<f64>() - budget).abs();
        for (&g, &s) in gains.iter().zip(&self.allocation) {
            let r = if g <= 0.0 {
                s.abs()
            } else if s > 0.0 {
                (s - (level - 1.0 / g)).abs()
            } else {
                (level - 1.0 / g).max(0.0)
            };
            worst = worst.max(r);
        }
        worst
    }
}

/// Maximises `Σ log2(1 + gains[m]·s[m])` subject to `Σ s ≤ budget`, `s ≥ 0`.
pub fn water_fill(gains: &[f64], budget: f64) -> Result<WaterFillSolution> {
    if !(budget >= 0.0) || !budget.is_finite() {
        return Err(Error::param("budget", format!("must be finite and >= 0, got {budget}")));
    }
    if let Some(g) = gains.iter().find(|g| !g.is_finite() || **g < 0.0) {
        return Err(Error::param("gains", format!("must be finite and >= 0, got {g}")));
    }
    let zeros = vec![0.0; gains.len()];
    let g_max = gains.iter().copied().fold(0.0, f64::max);
    if g_max == 0.0 {
        return Ok(WaterFillSolution {
            allocation: zeros,
            multiplier: f64::INFINITY,
            objective: 0.0,
            degenerate: budget > 0.0,
        });
    }
    if budget == 0.0 {
        return Ok(WaterFillSolution { allocation: zeros, multiplier: g_max, objective: 0.0, degenerate: false });
    }

    let inv: Vec<Option<f64>> = gains.iter().map(|&g| (g > 0.0).then(|| 1.0 / g)).collect();
    let poured = |level: f64| -> f64 { inv.iter().flatten().map(|&i| (level - i).max(0.0)).sum() };

    // Residual is negative at the lower end (nothing poured) and nonnegative
    // at the upper end (the weakest channel alone absorbs the budget).
    let inv_max = inv.iter().flatten().copied().fold(0.0, f64::max);
    let mut lo = 1.0 / g_max;
    let mut hi = inv_max + budget;
    let tol = 1e-12 * budget.max(1.0);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        let r = poured(mid) - budget;
        if r.abs() < tol {
            lo = mid;
            hi = mid;
            break;
        }
        if r > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let mut level = 0.5 * (lo + hi);

    // Solve exactly on the active set found by bisection.
    let active: Vec<f64> = inv.iter().flatten().copied().filter(|&i| i < level).collect();
    if !active.is_empty() {
        let exact = (budget + active.iter().sum::<f64>()) / active.len() as f64;
        let consistent = inv.iter().flatten().all(|&i| (i < exact) == active.contains(&i) || (i - exact).abs() <= tol);
        if consistent {
            level = exact;
        }
    }

    let allocation: Vec<f64> = inv.iter().map(|i| i.map_or(0.0, |i| (level - i).max(0.0))).collect();
    let objective = gains.iter().zip(&allocation).map(|(g, s)| (g * s).ln_1p()).sum::<f64>() / std::f64::consts::LN_2;
    Ok(WaterFillSolution { allocation, multiplier: 1.0 / level, objective, degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_channel_takes_budget() {
        let s = water_fill(&[2.0], 3.0).unwrap();
        assert_eq!(s.allocation, vec![3.0]);
    }

    #[test]
    fn symmetric_gains_split_evenly() {
        let s = water_fill(&[1.0, 1.0], 4.0).unwrap();
        assert!((s.allocation[0] - 2.0).abs() < 1e-12 && (s.allocation[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_budget_and_zero_gains() {
        let s = water_fill(&[1.0, 2.0], 0.0).unwrap();
        assert_eq!(s.allocation, vec![0.0, 0.0]);
        assert!(!s.degenerate);
        let d = water_fill(&[0.0, 0.0], 1.0).unwrap();
        assert!(d.degenerate);
        assert_eq!(d.allocation, vec![0.0, 0.0]);
    }

    #[test]
    fn zero_gain_channel_gets_nothing() {
        let s = water_fill(&[0.0, 1.0], 5.0).unwrap();
        assert_eq!(s.allocation[0], 0.0);
        assert!((s.allocation[1] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn weak_channel_stays_dry() {
        // Level 1/30 + 0.1 never reaches 1/0.3.
        let s = water_fill(&[30.0, 0.3], 0.1).unwrap();
        assert_eq!(s.allocation[1], 0.0);
        assert!((s.allocation[0] - 0.1).abs() < 1e-15);
        assert!(s.kkt_residual(&[30.0, 0.3], 0.1) < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(water_fill(&[1.0], -1.0).is_err());
        assert!(water_fill(&[f64::NAN], 1.0).is_err());
        assert!(water_fill(&[-1.0], 1.0).is_err());
    }
}
