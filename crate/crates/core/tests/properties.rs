use std::f64::consts::LN_2;

use noma_isac::channel::{
    correlation_from_eigenvalues, sample_downlink, sample_uplink, stream_rng, PairConfig, Stream, SystemConfig,
};
use noma_isac::downlink::{
    cc_design, comm_sum_rate, detect_all, ecr_sc_closed, instantaneous_rates, op_sc_closed, pareto_design,
    DownlinkBatch, PairGains,
};
use noma_isac::linalg::{squared_norm, CMat, C64};
use noma_isac::mathkit::{expint_ei, maximize_separable, water_fill, SeparableConcave, WishartMaxEig};
use noma_isac::region::{check_containment, PointTag, RatePoint, RateRegion};
use noma_isac::uplink::{align_realization, build_precoders};
use proptest::prelude::*;

struct LogGains(Vec<f64>);

impl SeparableConcave for LogGains {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn value(&self, m: usize, x: f64) -> f64 {
        (self.0[m] * x).ln_1p() / LN_2
    }
    fn slope(&self, m: usize, x: f64) -> f64 {
        self.0[m] / (1.0 + self.0[m] * x) / LN_2
    }
    fn curvature(&self, m: usize, x: f64) -> f64 {
        let t = self.0[m] / (1.0 + self.0[m] * x);
        -t * t / LN_2
    }
}

fn gains_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-3.0f64..3.0).prop_map(|e| 10f64.powf(e)), 1..7)
}

fn region(name: &str, pts: &[(f64, f64)]) -> RateRegion {
    let points = pts
        .iter()
        .enumerate()
        .map(|(i, &(sr, cr))| RatePoint { sr, cr, tag: PointTag::UplinkFdsac { kappa: i as f64 } })
        .collect();
    RateRegion::from_points(name, points)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn water_fill_meets_kkt(gains in gains_strategy(), budget_exp in -3.0f64..4.0) {
        let budget = 10f64.powf(budget_exp);
        let sol = water_fill(&gains, budget).unwrap();
        prop_assert!(sol.allocation.iter().all(|&x| x >= 0.0));
        prop_assert!((sol.allocation.iter().sum::<f64>() - budget).abs() <= 1e-9 * budget.max(1.0));
        prop_assert!(sol.kkt_residual(&gains, budget) < 1e-9);
    }

    #[test]
    fn generic_solver_agrees_with_water_fill(gains in gains_strategy(), budget_exp in -2.0f64..3.0) {
        let budget = 10f64.powf(budget_exp);
        let wf = water_fill(&gains, budget).unwrap();
        let problem = LogGains(gains.clone());
        let kkt = maximize_separable(&problem, budget);
        prop_assert!(kkt.residual(&problem, budget) < 1e-8);
        prop_assert!((kkt.objective - wf.objective).abs() < 1e-8 * wf.objective.max(1.0));
    }

    #[test]
    fn water_fill_beats_random_feasible_points(gains in gains_strategy(), weights in prop::collection::vec(0.0f64..1.0, 6)) {
        let budget = 10.0;
        let wf = water_fill(&gains, budget).unwrap();
        let w = &weights[..gains.len()];
        let total: f64 = w.iter().sum();
        prop_assume!(total > 0.0);
        let x: Vec<f64> = w.iter().map(|v| v / total * budget).collect();
        let obj: f64 = gains.iter().zip(&x).map(|(g, x)| (1.0 + g * x).log2()).sum();
        prop_assert!(obj <= wf.objective + 1e-9);
    }

    #[test]
    fn comm_powers_beat_perturbations(seed in 0u64..1000, p_exp in 0.0f64..4.0, shift in 0.0f64..0.3) {
        let cfg = SystemConfig::reference();
        let corr = correlation_from_eigenvalues(&[1.0, 0.1, 0.05, 0.01], 7).unwrap();
        let batch = DownlinkBatch::sample(&cfg, &corr, seed, 1);
        let p = 10f64.powf(p_exp);
        let design = cc_design(&cfg, &corr, &batch.gains[0], p);
        prop_assert!((design.powers.iter().sum::<f64>() - p).abs() < 1e-8 * p);
        let best = comm_sum_rate(&cfg.pairs, &batch.gains[0], &design.powers);
        // Move a share of power from the richest pair to each other pair.
        let top = (0..4).max_by(|&a, &b| design.powers[a].total_cmp(&design.powers[b])).unwrap();
        for k in (0..4).filter(|&k| k != top) {
            let mut q = design.powers.clone();
            let moved = shift * q[top];
            q[top] -= moved;
            q[k] += moved;
            prop_assert!(comm_sum_rate(&cfg.pairs, &batch.gains[0], &q) <= best + 1e-9);
        }
    }

    #[test]
    fn uplink_precoders_align(seed in 0u64..5000, n in 3usize..6) {
        let cfg = SystemConfig { bs_antennas: 4, ut_antennas: n, ..SystemConfig::reference() };
        let real = sample_uplink(&cfg, seed, 0);
        let mut rng = stream_rng(seed, 0, Stream::Combiner);
        for ch in &real.pairs {
            let pre = build_precoders(ch, &mut rng).unwrap();
            let residual = (&ch.h_near * &pre.w_near - &ch.h_far * &pre.w_far).norm();
            prop_assert!(residual < 1e-9);
            prop_assert!((squared_norm(&pre.w_near) + squared_norm(&pre.w_far) - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn uplink_detection_removes_inter_pair_interference(seed in 0u64..5000) {
        let cfg = SystemConfig::reference();
        let real = sample_uplink(&cfg, seed, 0);
        let (_, det) = align_realization(&real, seed, 0).unwrap();
        let prod = &det.q * &det.v;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    prop_assert!(prod[(i, j)].norm() < 1e-9 * prod[(j, j)].norm());
                }
            }
            prop_assert!((det.v.column(i).norm() - 1.0).abs() < 1e-12);
            prop_assert!((prod[(i, i)].norm_sqr() - det.inv_gains[i]).abs() < 1e-9 * det.inv_gains[i]);
        }
    }

    #[test]
    fn downlink_detection_nulls_other_beams(seed in 0u64..5000) {
        let cfg = SystemConfig::reference();
        let corr = correlation_from_eigenvalues(&[1.0, 0.1, 0.05, 0.01], seed).unwrap();
        let real = sample_downlink(&cfg, seed, 0);
        let det = detect_all(&real, &corr).unwrap();
        let u = corr.eigenvectors();
        for (m, (ch, d)) in real.pairs.iter().zip(&det).enumerate() {
            for k in 0..4 {
                let near = (d.v_near.adjoint() * &ch.h_near * u.column(k))[(0, 0)];
                let want = if k == m { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                prop_assert!((near - want).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn instantaneous_rates_are_nonnegative(near in 0.0f64..1e3, far in 0.0f64..1e3, c in 0.0f64..1e4, a in 0.01f64..0.49) {
        let pair = PairConfig { alpha_near: a, alpha_far: 1.0 - a, ..PairConfig::reference() };
        let (rn, rf) = instantaneous_rates(&pair, PairGains { near, far }, c);
        prop_assert!(rn >= 0.0 && rf >= 0.0);
        prop_assert!(rf <= ((1.0 - a) / a).ln_1p() / LN_2 + 1e-12);
    }

    #[test]
    fn closed_forms_are_monotone_in_power(s_exp in -1.0f64..5.0) {
        let cfg = SystemConfig::reference();
        let pair = PairConfig::reference();
        let s = 10f64.powf(s_exp);
        let (n0, f0) = ecr_sc_closed(&cfg, &pair, s).unwrap();
        let (n1, f1) = ecr_sc_closed(&cfg, &pair, 1.5 * s).unwrap();
        prop_assert!(n1 > n0 && f1 >= f0);
        let (o0, g0) = op_sc_closed(&cfg, &pair, s).unwrap();
        let (o1, g1) = op_sc_closed(&cfg, &pair, 1.5 * s).unwrap();
        prop_assert!(o1 <= o0 && g1 <= g0);
        prop_assert!((0.0..=1.0).contains(&o0) && (0.0..=1.0).contains(&g0));
    }

    #[test]
    fn wishart_cdf_is_a_distribution(m in 1usize..5, extra in 0usize..3, x in 1e-3f64..30.0) {
        let w = WishartMaxEig::new(m, m + extra).unwrap();
        let a = w.cdf(x).unwrap();
        let b = w.cdf(x + 0.5).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&a));
        prop_assert!(b >= a - 1e-12);
        prop_assert!(w.pdf(x).unwrap() >= -1e-12);
    }

    #[test]
    fn ei_of_minus_x_increases_with_x(x in 1e-6f64..50.0) {
        prop_assert!(expint_ei(-x).unwrap() < expint_ei(-1.1 * x).unwrap());
        prop_assert!(expint_ei(-x).unwrap() < 0.0);
    }

    #[test]
    fn regions_contain_themselves_and_shrunk_copies(pts in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 1..30)) {
        let outer = region("outer", &pts);
        prop_assert!(check_containment(&outer, &outer).unwrap().passed);
        let shrunk: Vec<(f64, f64)> = pts.iter().map(|&(s, c)| (0.9 * s, 0.9 * c)).collect();
        prop_assert!(check_containment(&region("inner", &shrunk), &outer).unwrap().passed);
        for p in &outer.points {
            prop_assert!(outer.contains_point(p));
        }
        // Hull is a staircase: SR decreasing while CR increases.
        for w in outer.hull.windows(2) {
            prop_assert!((w[0].sr - w[1].sr) * (w[0].cr - w[1].cr) < 0.0);
        }
    }

    #[test]
    fn enlarged_point_escapes_region(pts in prop::collection::vec((0.1f64..10.0, 0.1f64..10.0), 1..30)) {
        let outer = region("outer", &pts);
        let grown: Vec<(f64, f64)> = pts.iter().map(|&(s, c)| (1.1 * s, 1.1 * c)).collect();
        prop_assert!(!check_containment(&region("inner", &grown), &outer).unwrap().passed);
    }
}

#[test]
fn pareto_frontier_is_monotone() {
    let cfg = SystemConfig::reference();
    let corr = correlation_from_eigenvalues(&[1.0, 0.1, 0.05, 0.01], 7).unwrap();
    let batch = DownlinkBatch::sample(&cfg, &corr, 3, 300);
    let p = 10f64.powf(2.5);
    let pts: Vec<_> = (0..=10).map(|i| pareto_design(&cfg, &corr, &batch, p, i as f64 / 10.0).unwrap()).collect();
    for w in pts.windows(2) {
        assert!(w[1].sensing_rate >= w[0].sensing_rate - 1e-9);
        assert!(w[1].comm_rate <= w[0].comm_rate + 1e-9);
    }
}

#[test]
fn target_response_covariance() {
    let corr = correlation_from_eigenvalues(&[1.0, 0.1, 0.05, 0.01], 7).unwrap();
    let trials = 100_000u64;
    let mut acc = CMat::zeros(4, 4);
    let mut cross = C64::new(0.0, 0.0);
    for t in 0..trials {
        let g = noma_isac::channel::sample_target_response(&corr, 11, t);
        // Rows are g_m^H, so g_m g_m^H = (row^H)(row).
        let row = g.row(0);
        acc += row.adjoint() * row;
        cross += (g.row(0) * g.row(1).adjoint())[(0, 0)];
    }
    let est = acc / C64::new(trials as f64, 0.0);
    let want = corr.matrix();
    for i in 0..4 {
        for j in 0..4 {
            // Entry (i, j) has variance at most R_ii R_jj / n.
            let band = 4.0 * (want[(i, i)].re * want[(j, j)].re / trials as f64).sqrt();
            assert!((est[(i, j)] - want[(i, j)]).norm() < band, "({i},{j})");
        }
    }
    let band = 4.0 * (corr.matrix().norm_squared() / trials as f64).sqrt();
    assert!((cross / C64::new(trials as f64, 0.0)).norm() < band);
}

#[test]
fn uplink_channel_entries_are_uncorrelated() {
    let cfg = SystemConfig::reference();
    let trials = 100_000u64;
    let (mut var, mut cov) = (0.0, C64::new(0.0, 0.0));
    for t in 0..trials {
        let r = sample_uplink(&cfg, 21, t);
        let h = &r.pairs[0].h_near;
        var += h[(0, 0)].norm_sqr();
        cov += h[(0, 0)] * h[(1, 2)].conj();
    }
    let n = trials as f64;
    assert!((var / n - 1.0).abs() < 4.0 / n.sqrt());
    assert!((cov / C64::new(n, 0.0)).norm() < 4.0 / n.sqrt());
}
