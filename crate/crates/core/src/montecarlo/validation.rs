//! Closed form against simulation, plus slope and diversity fits.

use std::fmt::Write as _;

use crate::db_to_linear;
use crate::downlink::{
    ecr_sc_closed, ecr_sc_sum_closed, ecr_sc_upper, op_asymptotic, op_lower_bounds, op_sc_closed, sc_design, sr_cc,
    DownlinkBatch, OutageAsymptote, OutageThresholds,
};
use crate::error::Result;
use crate::fdsac::{fdsac_dl_sr, fdsac_ul_rates};
use crate::uplink::{
    cc_sensing, sc_sensing_waveform, uplink_cc_ecr, uplink_cc_op, uplink_sc_ecr_frame, uplink_sc_op, UplinkAggregates,
    UplinkBatch,
};

use super::estimate::{simulate_downlink_batch, simulate_uplink_batch, Design, MonteCarloEstimate, Scenario};
use super::stats::{estimate_diversity, estimate_slope, ks_exponential_test};

/// Every closed-form metric with a simulated counterpart. Each must show up
/// in a report built for a square downlink.
pub const CLOSED_FORM_METRICS: &[&str] = &[
    "dl_sum_ecr",
    "dl_ut_ecr",
    "dl_ut_ecr_upper",
    "dl_op",
    "dl_op_lower",
    "ul_sum_ecr",
    "ul_op",
    "ul_inv_gain_law",
];

pub const Z_LIMIT: f64 = 3.0;
pub const KS_LIMIT: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Rate,
    Outage,
    /// The simulated value must not exceed the reference.
    UpperBound,
    /// The simulated value must not fall below the reference.
    LowerBound,
    /// KS distance of a sample to its law.
    Distribution,
}

impl RowKind {
    pub fn label(&self) -> &'static str {
        match self {
            RowKind::Rate => "rate",
            RowKind::Outage => "outage",
            RowKind::UpperBound => "upper_bound",
            RowKind::LowerBound => "lower_bound",
            RowKind::Distribution => "distribution",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub kind: RowKind,
    pub metric: String,
    pub design: String,
    pub snr_db: f64,
    pub reference: f64,
    pub estimate: MonteCarloEstimate,
    pub z: f64,
    pub pass: bool,
}

impl ComparisonRow {
    fn new(kind: RowKind, metric: &str, design: &str, snr_db: f64, reference: f64, estimate: MonteCarloEstimate) -> Self {
        let mut z = estimate.z_score(reference);
        if kind == RowKind::Outage && (0.0..=1.0).contains(&reference) {
            // Score test: spread of the binomial at the reference value.
            let null = (reference * (1.0 - reference) / estimate.trials as f64).sqrt();
            let spread = estimate.stderr.max(null);
            if spread > 0.0 {
                z = (estimate.mean - reference) / spread;
            }
        }
        let pass = !estimate.flagged()
            && match kind {
                RowKind::Rate | RowKind::Outage => z.abs() <= Z_LIMIT,
                RowKind::UpperBound => z <= Z_LIMIT,
                RowKind::LowerBound => z >= -Z_LIMIT,
                RowKind::Distribution => estimate.mean < KS_LIMIT,
            };
        Self { kind, metric: metric.into(), design: design.into(), snr_db, reference, estimate, z, pass }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitKind {
    Slope,
    Diversity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub kind: FitKind,
    pub metric: String,
    pub design: String,
    pub snr_db: Vec<f64>,
    pub measured: f64,
    pub theory: f64,
    /// Relative tolerance.
    pub tolerance: f64,
    pub r_squared: f64,
    pub pass: bool,
}

impl FitRow {
    fn new(kind: FitKind, metric: &str, design: &str, snr_db: &[f64], curve: &[f64], theory: f64, tolerance: f64) -> Result<Self> {
        let fit = match kind {
            FitKind::Slope => estimate_slope(snr_db, curve)?,
            FitKind::Diversity => estimate_diversity(snr_db, curve)?,
        };
        let pass = ((fit.slope - theory) / theory).abs() <= tolerance;
        Ok(Self {
            kind,
            metric: metric.into(),
            design: design.into(),
            snr_db: snr_db.to_vec(),
            measured: fit.slope,
            theory,
            tolerance,
            r_squared: fit.r_squared,
            pass,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOptions {
    pub trials: u64,
    pub seed: u64,
    pub rate_snr_db: Vec<f64>,
    pub outage_snr_db: Vec<f64>,
    pub slope_snr_db: Vec<f64>,
    pub bound_snr_db: Vec<f64>,
}

impl ValidationOptions {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            rate_snr_db: vec![10.0, 20.0, 30.0],
            outage_snr_db: vec![15.0, 25.0, 35.0],
            slope_snr_db: vec![50.0, 55.0, 60.0],
            bound_snr_db: vec![20.0, 25.0, 30.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub rows: Vec<ComparisonRow>,
    pub fits: Vec<FitRow>,
}

fn fmt_snr(snr: &[f64]) -> String {
    match (snr.first(), snr.last()) {
        (Some(a), Some(b)) => format!("{a}:{b}"),
        _ => String::new(),
    }
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass) && self.fits.iter().all(|f| f.pass)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count() + self.fits.iter().filter(|f| !f.pass).count()
    }

    pub fn csv_header() -> &'static str {
        "kind,metric,design,snr_db,reference,estimate,stderr,trials,z,tolerance,r_squared,verdict"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::csv_header());
        out.push('\n');
        let verdict = |b: bool| if b { "pass" } else { "fail" };
        for r in &self.rows {
            let tol = if r.kind == RowKind::Distribution { KS_LIMIT } else { Z_LIMIT };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},,{}",
                r.kind.label(),
                r.metric,
                r.design,
                r.snr_db,
                r.reference,
                r.estimate.mean,
                r.estimate.stderr,
                r.estimate.trials,
                r.z,
                tol,
                if r.estimate.flagged() { "flagged" } else { verdict(r.pass) }
            );
        }
        for f in &self.fits {
            let kind = match f.kind {
                FitKind::Slope => "slope",
                FitKind::Diversity => "diversity",
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},,,,{},{},{}",
                kind,
                f.metric,
                f.design,
                fmt_snr(&f.snr_db),
                f.theory,
                f.measured,
                f.tolerance,
                f.r_squared,
                verdict(f.pass)
            );
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let tag = |b: bool| if b { "PASS" } else { "FAIL" };
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{} {:<12} {:<16} {:<6} {:>5} dB  reference {:.6e}  simulated {:.6e} ± {:.2e}  z = {:+.2}",
                tag(r.pass),
                r.kind.label(),
                r.metric,
                r.design,
                r.snr_db,
                r.reference,
                r.estimate.mean,
                r.estimate.stderr,
                r.z
            );
        }
        for f in &self.fits {
            let _ = writeln!(
                out,
                "{} {:<12} {:<16} {:<6} {:>9} dB  measured {:.4}  theory {:.4} ± {:.0}%  R² = {:.6}",
                tag(f.pass),
                match f.kind {
                    FitKind::Slope => "slope",
                    FitKind::Diversity => "diversity",
                },
                f.metric,
                f.design,
                fmt_snr(&f.snr_db),
                f.measured,
                f.theory,
                100.0 * f.tolerance,
                f.r_squared
            );
        }
        let _ = writeln!(out, "{} of {} checks failed", self.failures(), self.rows.len() + self.fits.len());
        out
    }
}

fn mean_of(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}

/// Runs every check on one downlink and one uplink batch drawn from `options.seed`.
pub fn run_validation(scenario: &Scenario, options: &ValidationOptions) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    downlink_rows(scenario, options, &mut report)?;
    uplink_rows(scenario, options, &mut report)?;
    Ok(report)
}

fn downlink_rows(scenario: &Scenario, options: &ValidationOptions, report: &mut ValidationReport) -> Result<()> {
    let cfg = &scenario.config;
    let corr = &scenario.corr;
    let l = cfg.frame_len;
    let square = cfg.bs_antennas == cfg.ut_antennas;
    let batch = DownlinkBatch::sample(cfg, corr, options.seed, options.trials);

    for &snr in &options.rate_snr_db {
        let p = db_to_linear(snr);
        let powers = sc_design(corr, p, l)?.powers;
        let sim = simulate_downlink_batch(scenario, Design::SensingCentric, p, &batch)?;
        if square {
            let closed = ecr_sc_sum_closed(cfg, &powers)?;
            let est = MonteCarloEstimate::from_samples(&sim.sum_rate(), sim.discarded);
            report.rows.push(ComparisonRow::new(RowKind::Rate, "dl_sum_ecr", "sc", snr, closed, est));
        }
        for (m, (pair, &s)) in cfg.pairs.iter().zip(&powers).enumerate() {
            let near = MonteCarloEstimate::from_samples(&sim.near_rate[m], sim.discarded);
            let far = MonteCarloEstimate::from_samples(&sim.far_rate[m], sim.discarded);
            if square {
                let (cn, cf) = ecr_sc_closed(cfg, pair, s)?;
                report.rows.push(ComparisonRow::new(RowKind::Rate, "dl_ut_ecr", &format!("sc_p{m}_near"), snr, cn, near));
                report.rows.push(ComparisonRow::new(RowKind::Rate, "dl_ut_ecr", &format!("sc_p{m}_far"), snr, cf, far));
            }
            let (un, uf) = ecr_sc_upper(cfg, pair, s)?;
            report
                .rows
                .push(ComparisonRow::new(RowKind::UpperBound, "dl_ut_ecr_upper", &format!("sc_p{m}_near"), snr, un, near));
            report
                .rows
                .push(ComparisonRow::new(RowKind::UpperBound, "dl_ut_ecr_upper", &format!("sc_p{m}_far"), snr, uf, far));
        }
    }

    for &snr in &options.outage_snr_db {
        let p = db_to_linear(snr);
        let powers = sc_design(corr, p, l)?.powers;
        let sim = simulate_downlink_batch(scenario, Design::SensingCentric, p, &batch)?;
        for (m, (pair, &s)) in cfg.pairs.iter().zip(&powers).enumerate() {
            let (near_ind, far_ind) = sim.outage(cfg, m);
            let near = MonteCarloEstimate::from_indicators(&near_ind, sim.discarded);
            let far = MonteCarloEstimate::from_indicators(&far_ind, sim.discarded);
            if square {
                let (cn, cf) = op_sc_closed(cfg, pair, s)?;
                report.rows.push(ComparisonRow::new(RowKind::Outage, "dl_op", &format!("sc_p{m}_near"), snr, cn, near));
                report.rows.push(ComparisonRow::new(RowKind::Outage, "dl_op", &format!("sc_p{m}_far"), snr, cf, far));
            }
            let (ln, lf) = op_lower_bounds(cfg, pair, s)?;
            report.rows.push(ComparisonRow::new(RowKind::LowerBound, "dl_op_lower", &format!("sc_p{m}_near"), snr, ln, near));
            report.rows.push(ComparisonRow::new(RowKind::LowerBound, "dl_op_lower", &format!("sc_p{m}_far"), snr, lf, far));
        }
    }

    // High-SNR slopes.
    let m = cfg.bs_antennas as f64;
    let sr_slope = m * m / l as f64;
    let split = scenario.split()?;
    let grid = &options.slope_snr_db;
    let mut sc_sr = Vec::new();
    let mut sc_ecr = Vec::new();
    let mut cc_sr = Vec::new();
    let mut cc_ecr = Vec::new();
    let mut fd_sr = Vec::new();
    let mut fd_ecr = Vec::new();
    for &snr in grid {
        let p = db_to_linear(snr);
        let sc = sc_design(corr, p, l)?;
        sc_sr.push(sr_cc(&sc.powers, corr, l));
        if square {
            sc_ecr.push(ecr_sc_sum_closed(cfg, &sc.powers)?);
        } else {
            sc_ecr.push(mean_of(&simulate_downlink_batch(scenario, Design::SensingCentric, p, &batch)?.sum_rate()));
        }
        let cc = simulate_downlink_batch(scenario, Design::CommunicationsCentric, p, &batch)?;
        cc_sr.push(mean_of(&cc.sensing_rate));
        cc_ecr.push(mean_of(&cc.sum_rate()));
        fd_sr.push(fdsac_dl_sr(corr, split, p, l)?);
        fd_ecr.push(mean_of(&simulate_downlink_batch(scenario, Design::Fdsac, p, &batch)?.sum_rate()));
    }
    let fits = &mut report.fits;
    fits.push(FitRow::new(FitKind::Slope, "dl_sr", "sc", grid, &sc_sr, sr_slope, 0.02)?);
    fits.push(FitRow::new(FitKind::Slope, "dl_sr", "cc", grid, &cc_sr, sr_slope, 0.02)?);
    fits.push(FitRow::new(FitKind::Slope, "dl_ecr", "sc", grid, &sc_ecr, m, 0.02)?);
    fits.push(FitRow::new(FitKind::Slope, "dl_ecr", "cc", grid, &cc_ecr, m, 0.02)?);
    if split.kappa < 1.0 {
        fits.push(FitRow::new(FitKind::Slope, "dl_sr", "fdsac", grid, &fd_sr, (1.0 - split.kappa) * sr_slope, 0.03)?);
    }
    if split.kappa > 0.0 {
        fits.push(FitRow::new(FitKind::Slope, "dl_ecr", "fdsac", grid, &fd_ecr, split.kappa * m, 0.03)?);
    }

    // Diversity of the closed-form outage curves, first pair.
    let pair = &cfg.pairs[0];
    let far_possible = OutageThresholds::new(pair).rho_far.is_some();
    if square && far_possible {
        let mut near = Vec::new();
        let mut far = Vec::new();
        for &snr in grid {
            let s = sc_design(corr, db_to_linear(snr), l)?.powers[0];
            let (n, f) = op_sc_closed(cfg, pair, s)?;
            near.push(n);
            far.push(f);
        }
        fits.push(FitRow::new(FitKind::Diversity, "dl_op", "sc_p0_near", grid, &near, 1.0, 0.05)?);
        fits.push(FitRow::new(FitKind::Diversity, "dl_op", "sc_p0_far", grid, &far, 1.0, 0.05)?);
    }
    if far_possible {
        let bound: Vec<f64> = options
            .bound_snr_db
            .iter()
            .map(|&snr| op_asymptotic(cfg, pair, db_to_linear(snr), OutageAsymptote::Bound).map(|v| v.1))
            .collect::<Result<_>>()?;
        let mn = (cfg.bs_antennas * cfg.ut_antennas) as f64;
        fits.push(FitRow::new(FitKind::Diversity, "dl_op_bound", "sc_p0_far", &options.bound_snr_db, &bound, mn, 0.10)?);
    }
    Ok(())
}

fn uplink_rows(scenario: &Scenario, options: &ValidationOptions, report: &mut ValidationReport) -> Result<()> {
    let cfg = &scenario.config;
    let corr = &scenario.corr;
    let l = cfg.frame_len;
    let p_s = cfg.uplink_sens_power;
    let batch = UplinkBatch::sample(cfg, options.seed, options.trials);
    let sc_wave = sc_sensing_waveform(corr, p_s, l, scenario.spreading)?;
    let split = scenario.split()?;

    for &snr in &options.rate_snr_db {
        let p_c = db_to_linear(snr);
        let agg = UplinkAggregates::new(cfg, p_c);
        let references = [
            (Design::SensingCentric, uplink_sc_ecr_frame(&agg, &sc_wave.per_slot_sigma, p_c)),
            (Design::CommunicationsCentric, uplink_cc_ecr(&agg, p_c)),
            (Design::Fdsac, fdsac_ul_rates(corr, split.kappa, p_c, p_s, l, &agg)?.1),
        ];
        for (design, reference) in references {
            let sim = simulate_uplink_batch(scenario, design, p_c, &batch)?;
            let est = MonteCarloEstimate::from_samples(&sim.sum_rate(), sim.discarded);
            report.rows.push(ComparisonRow::new(RowKind::Rate, "ul_sum_ecr", design.label(), snr, reference, est));
        }
    }

    for &snr in &options.outage_snr_db {
        let p_c = db_to_linear(snr);
        let agg = UplinkAggregates::new(cfg, p_c);
        let slots = sc_wave.per_slot_sigma.len() as f64;
        let mut sc_ref = vec![0.0; cfg.pairs.len()];
        for &sigma2 in &sc_wave.per_slot_sigma {
            for (acc, v) in sc_ref.iter_mut().zip(uplink_sc_op(&agg, &cfg.pairs, sigma2, p_c)) {
                *acc += v / slots;
            }
        }
        let cc_ref = uplink_cc_op(&agg, &cfg.pairs, p_c);
        for (design, refs) in [(Design::SensingCentric, sc_ref), (Design::CommunicationsCentric, cc_ref)] {
            let sim = simulate_uplink_batch(scenario, design, p_c, &batch)?;
            for (m, reference) in refs.into_iter().enumerate() {
                let est = MonteCarloEstimate::from_indicators(&sim.pair_outage[m], sim.discarded);
                let label = format!("{}_p{m}", design.label());
                report.rows.push(ComparisonRow::new(RowKind::Outage, "ul_op", &label, snr, reference, est));
            }
        }
    }

    let gains: Vec<f64> = batch.inv_gains.iter().flatten().copied().collect();
    let ks = ks_exponential_test(&gains)?;
    let est = MonteCarloEstimate { mean: ks, stderr: f64::NAN, trials: gains.len() as u64, discarded: batch.discarded as u64 };
    report.rows.push(ComparisonRow::new(RowKind::Distribution, "ul_inv_gain_law", "exp1", f64::NAN, 0.0, est));

    // Slopes and diversity from the closed forms.
    let m = cfg.bs_antennas as f64;
    let grid = &options.slope_snr_db;
    let (mut sc_ecr, mut cc_ecr, mut sc_sr, mut cc_sr, mut sc_op, mut cc_op) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let ref_agg = UplinkAggregates::new(cfg, cfg.uplink_comm_power);
    for &snr in grid {
        let p = db_to_linear(snr);
        let agg = UplinkAggregates::new(cfg, p);
        sc_ecr.push(uplink_sc_ecr_frame(&agg, &sc_wave.per_slot_sigma, p));
        cc_ecr.push(uplink_cc_ecr(&agg, p));
        sc_op.push(uplink_sc_op(&agg, &cfg.pairs, sc_wave.per_slot_sigma[0], p)[0]);
        cc_op.push(uplink_cc_op(&agg, &cfg.pairs, p)[0]);
        sc_sr.push(sc_sensing_waveform(corr, p, l, scenario.spreading)?.sensing_rate);
        cc_sr.push(cc_sensing(corr, p, l, &ref_agg, scenario.spreading)?.sensing_rate);
    }
    let sr_slope = m * m / l as f64;
    let fits = &mut report.fits;
    fits.push(FitRow::new(FitKind::Slope, "ul_ecr", "sc", grid, &sc_ecr, m, 0.02)?);
    fits.push(FitRow::new(FitKind::Slope, "ul_ecr", "cc", grid, &cc_ecr, m, 0.02)?);
    fits.push(FitRow::new(FitKind::Slope, "ul_sr", "sc", grid, &sc_sr, sr_slope, 0.02)?);
    fits.push(FitRow::new(FitKind::Slope, "ul_sr", "cc", grid, &cc_sr, sr_slope, 0.02)?);
    fits.push(FitRow::new(FitKind::Diversity, "ul_op", "sc_p0", grid, &sc_op, 1.0, 0.05)?);
    fits.push(FitRow::new(FitKind::Diversity, "ul_op", "cc_p0", grid, &cc_op, 1.0, 0.05)?);
    Ok(())
}
