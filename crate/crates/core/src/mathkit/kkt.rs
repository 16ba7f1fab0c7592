//! Budget-constrained maximisation of a separable concave objective.
//!
//! Solves `max Σ_m f_m(x_m)` subject to `Σ x_m = budget`, `x ≥ 0` where each
//! `f_m` is increasing, concave and twice differentiable. The KKT conditions
//! give `f_m'(x_m) = ν` on the active set; each `x_m(ν)` is found by a
//! safeguarded Newton iteration and `ν` by safeguarded Newton on the budget
//! residual, whose derivative is `Σ 1/f_m''`.

pub trait SeparableConcave {
    fn dim(&self) -> usize;
    fn value(&self, m: usize, x: f64) -> f64;
    fn slope(&self, m: usize, x: f64) -> f64;
    fn curvature(&self, m: usize, x: f64) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
pub struct KktSolution {
    pub allocation: Vec<f64>,
    pub multiplier: f64,
    pub objective: f64,
}

impl KktSolution {
    /// Largest stationarity or complementarity violation, relative to `ν`.
    pub fn residual<P: SeparableConcave>(&self, problem: &P, budget: f64) -> f64 {
        let nu = self.multiplier;
        let mut worst = (self.allocation.iter().sum::<f64>() - budget).abs() / budget.max(1.0);
        for (m, &x) in self.allocation.iter().enumerate() {
            let g = problem.slope(m, x);
            let r = if x > 0.0 { (g - nu).abs() } else { (g - nu).max(0.0) };
            worst = worst.max(r / nu.max(f64::MIN_POSITIVE));
        }
        worst
    }
}

/// Point where `slope(m, ·) = nu`, or 0 if the slope at 0 is already below.
fn level_point<P: SeparableConcave>(p: &P, m: usize, nu: f64) -> f64 {
    if p.slope(m, 0.0) <= nu {
        return 0.0;
    }
    let mut hi = 1.0 / nu;
    let mut guard = 0;
    while p.slope(m, hi) > nu && guard < 2000 {
        hi *= 2.0;
        guard += 1;
    }
    let mut lo = 0.0;
    let mut x = 0.5 * hi;
    for _ in 0..200 {
        let r = p.slope(m, x) - nu;
        if r > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let c = p.curvature(m, x);
        let mut next = if c < 0.0 { x - r / c } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.max(f64::MIN_POSITIVE) || hi - lo <= 1e-16 * hi {
            return next;
        }
        x = next;
    }
    x
}

fn sweep<P: SeparableConcave>(p: &P, nu: f64) -> Vec<f64> {
    (0..p.dim()).map(|m| level_point(p, m, nu)).collect()
}

pub fn maximize_separable<P: SeparableConcave>(problem: &P, budget: f64) -> KktSolution {
    let dim = problem.dim();
    let nu_top = (0..dim).map(|m| problem.slope(m, 0.0)).fold(0.0, f64::max);
    if budget <= 0.0 || nu_top <= 0.0 {
        return KktSolution { allocation: vec![0.0; dim], multiplier: nu_top, objective: 0.0 };
    }

    // Bracket ν: total(hi) = 0 < budget ≤ total(lo).
    let mut hi = nu_top;
    let mut lo = 0.5 * nu_top;
    while sweep(problem, lo).iter().sum::<f64>() < budget && lo > 1e-300 {
        hi = lo;
        lo *= 0.5;
    }

    let tol = 1e-13 * budget.max(1.0);
    let mut nu = (lo * hi).sqrt();
    let mut x = sweep(problem, nu);
    for _ in 0..300 {
        let gap = x.iter().sum::<f64>() - budget;
        if gap.abs() <= tol {
            break;
        }
        if gap > 0.0 {
            lo = nu;
        } else {
            hi = nu;
        }
        let deriv: f64 = x
            .iter()
            .enumerate()
            .filter(|(_, &xm)| xm > 0.0)
            .map(|(m, &xm)| 1.0 / problem.curvature(m, xm))
            .sum();
        let mut next = if deriv < 0.0 { nu - gap / deriv } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if hi - lo <= 1e-15 * hi {
            nu = next;
            x = sweep(problem, nu);
            break;
        }
        nu = next;
        x = sweep(problem, nu);
    }

    // Spread the remaining budget mismatch over the active set, weighted by
    // the local inverse curvature (one Newton step at fixed ν).
    let gap = budget - x.iter().sum::<f64>();
    let weights: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(m, &xm)| if xm > 0.0 { -1.0 / problem.curvature(m, xm) } else { 0.0 })
        .collect();
    let total: f64 = weights.iter().sum();
    if total > 0.0 && total.is_finite() {
        for (xm, w) in x.iter_mut().zip(&weights) {
            *xm = (*xm + gap * w / total).max(0.0);
        }
    }

    let objective = x.iter().enumerate().map(|(m, &xm)| problem.value(m, xm)).sum();
    KktSolution { allocation: x, multiplier: nu, objective }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Σ log(1 + g x): the water-filling problem.
    struct LogSum(Vec<f64>);

    impl SeparableConcave for LogSum {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn value(&self, m: usize, x: f64) -> f64 {
            (self.0[m] * x).ln_1p()
        }
        fn slope(&self, m: usize, x: f64) -> f64 {
            self.0[m] / (1.0 + self.0[m] * x)
        }
        fn curvature(&self, m: usize, x: f64) -> f64 {
            let d = 1.0 + self.0[m] * x;
            -self.0[m] * self.0[m] / (d * d)
        }
    }

    #[test]
    fn reproduces_water_filling() {
        let gains = vec![30.0, 3.0, 1.5, 0.3];
        for budget in [0.01, 0.5, 1.0, 10.0, 1e4] {
            let sol = maximize_separable(&LogSum(gains.clone()), budget);
            let wf = crate::mathkit::water_fill(&gains, budget).unwrap();
            for (a, b) in sol.allocation.iter().zip(&wf.allocation) {
                assert!((a - b).abs() < 1e-9 * budget.max(1.0), "budget {budget}: {a} vs {b}");
            }
            assert!(sol.residual(&LogSum(gains.clone()), budget) < 1e-8);
        }
    }

    #[test]
    fn zero_budget_gives_zero() {
        let sol = maximize_separable(&LogSum(vec![1.0, 2.0]), 0.0);
        assert_eq!(sol.allocation, vec![0.0, 0.0]);
    }
}
