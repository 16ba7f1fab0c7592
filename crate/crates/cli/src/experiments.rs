use noma_isac::db_to_linear;
use noma_isac::downlink::{
    ecr_sc_closed, ecr_sc_sum_asymptotic, ecr_sc_sum_closed, ecr_sc_upper, op_asymptotic, op_lower_bounds,
    op_sc_closed, sc_design, sr_sc_asymptotic, DownlinkBatch, OutageAsymptote,
};
use noma_isac::fdsac::{fdsac_dl_sr, fdsac_ul_rates};
use noma_isac::montecarlo::{
    run_validation, simulate_downlink_batch, simulate_uplink_batch, Design, MonteCarloEstimate, Scenario,
    ValidationOptions,
};
use noma_isac::region::{
    check_containment, downlink_fdsac_region, downlink_isac_region, step_grid, uniform_grid, uplink_regions,
    ContainmentReport,
};
use noma_isac::uplink::{
    cc_sensing, sc_sensing_waveform, uplink_cc_ecr, uplink_cc_ecr_asymptotic, uplink_cc_op, uplink_cc_op_asymptotic,
    uplink_sc_ecr_asymptotic, uplink_sc_ecr_frame, uplink_sc_op, uplink_sc_op_asymptotic, UplinkAggregates,
    UplinkBatch,
};

use crate::output::{write_curves, write_regions, CurveRow};
use crate::{Failure, Settings};

const DESIGNS: [Design; 3] = [Design::SensingCentric, Design::CommunicationsCentric, Design::Fdsac];

fn grid(s: &Settings, default: (f64, f64, f64)) -> Vec<f64> {
    s.snr_grid.clone().unwrap_or_else(|| {
        let (start, step, stop) = default;
        let n = ((stop - start) / step).round() as usize;
        (0..=n).map(|i| start + i as f64 * step).collect()
    })
}

fn scenario(s: &Settings) -> Result<Scenario, Failure> {
    Ok(Scenario::from_experiment(&s.experiment)?)
}

fn downlink_batch(s: &Settings, sc: &Scenario) -> DownlinkBatch {
    DownlinkBatch::sample(&sc.config, &sc.corr, s.experiment.seed, s.experiment.trials)
}

fn avg(values: &[f64], n: usize) -> f64 {
    values.iter().sum::<f64>() / n as f64
}

pub fn dl_rates(s: &Settings) -> Result<(), Failure> {
    let sc = scenario(s)?;
    let cfg = &sc.config;
    let l = cfg.frame_len;
    let square = cfg.bs_antennas == cfg.ut_antennas;
    let split = sc.split()?;
    let batch = downlink_batch(s, &sc);
    let (mut sum, mut ut, mut sr) = (Vec::new(), Vec::new(), Vec::new());
    for snr in grid(s, (0.0, 5.0, 60.0)) {
        let p = db_to_linear(snr);
        let powers = sc_design(&sc.corr, p, l)?.powers;
        if square {
            sum.push(CurveRow::exact(snr, "sum_ecr", "sc_closed", ecr_sc_sum_closed(cfg, &powers)?));
        }
        sum.push(CurveRow::exact(snr, "sum_ecr", "sc_asymptotic", ecr_sc_sum_asymptotic(cfg, p)));
        for design in DESIGNS {
            let sim = simulate_downlink_batch(&sc, design, p, &batch)?;
            let est = MonteCarloEstimate::from_samples(&sim.sum_rate(), sim.discarded);
            sum.push(CurveRow::simulated(snr, "sum_ecr", design.label(), &est));
            if design == Design::CommunicationsCentric {
                let est = MonteCarloEstimate::from_samples(&sim.sensing_rate, sim.discarded);
                sr.push(CurveRow::simulated(snr, "sr", design.label(), &est));
            }
            if design == Design::SensingCentric {
                for (m, (pair, &c)) in cfg.pairs.iter().zip(&powers).enumerate() {
                    let (un, uf) = ecr_sc_upper(cfg, pair, c)?;
                    let closed = if square { Some(ecr_sc_closed(cfg, pair, c)?) } else { None };
                    for (side, sims, upper, exact) in [
                        ("near", &sim.near_rate[m], un, closed.map(|v| v.0)),
                        ("far", &sim.far_rate[m], uf, closed.map(|v| v.1)),
                    ] {
                        let metric = format!("ecr_p{m}_{side}");
                        if let Some(v) = exact {
                            ut.push(CurveRow::exact(snr, &metric, "sc_closed", v));
                        }
                        ut.push(CurveRow::exact(snr, &metric, "sc_upper", upper));
                        let est = MonteCarloEstimate::from_samples(sims, sim.discarded);
                        ut.push(CurveRow::simulated(snr, &metric, "sc", &est));
                    }
                }
            }
        }
        let sc_sr = noma_isac::downlink::sr_cc(&powers, &sc.corr, l);
        sr.push(CurveRow::exact(snr, "sr", "sc", sc_sr));
        sr.push(CurveRow::exact(snr, "sr", "sc_asymptotic", sr_sc_asymptotic(&sc.corr, p, l)));
        sr.push(CurveRow::exact(snr, "sr", "fdsac", fdsac_dl_sr(&sc.corr, split, p, l)?));
    }
    write_curves(&s.out.join("dl_sum_ecr.csv"), &sum)?;
    write_curves(&s.out.join("dl_ut_ecr.csv"), &ut)?;
    write_curves(&s.out.join("dl_sr.csv"), &sr)?;
    Ok(())
}

pub fn dl_outage(s: &Settings) -> Result<(), Failure> {
    let sc = scenario(s)?;
    let cfg = &sc.config;
    let square = cfg.bs_antennas == cfg.ut_antennas;
    let batch = downlink_batch(s, &sc);
    let mut rows = Vec::new();
    for snr in grid(s, (0.0, 5.0, 40.0)) {
        let p = db_to_linear(snr);
        let powers = sc_design(&sc.corr, p, cfg.frame_len)?.powers;
        let sims = [
            (Design::SensingCentric, simulate_downlink_batch(&sc, Design::SensingCentric, p, &batch)?),
            (Design::CommunicationsCentric, simulate_downlink_batch(&sc, Design::CommunicationsCentric, p, &batch)?),
        ];
        for (m, (pair, &c)) in cfg.pairs.iter().zip(&powers).enumerate() {
            let lower = op_lower_bounds(cfg, pair, c)?;
            let bound = op_asymptotic(cfg, pair, p, OutageAsymptote::Bound)?;
            let exact = if square {
                Some((op_sc_closed(cfg, pair, c)?, op_asymptotic(cfg, pair, p, OutageAsymptote::Exact)?))
            } else {
                None
            };
            for (k, side) in ["near", "far"].into_iter().enumerate() {
                let pick = |v: (f64, f64)| if k == 0 { v.0 } else { v.1 };
                let metric = format!("op_p{m}_{side}");
                if let Some((closed, asym)) = exact {
                    rows.push(CurveRow::exact(snr, &metric, "sc_closed", pick(closed)));
                    rows.push(CurveRow::exact(snr, &metric, "sc_asymptotic", pick(asym)));
                }
                rows.push(CurveRow::exact(snr, &metric, "sc_lower", pick(lower)));
                rows.push(CurveRow::exact(snr, &metric, "sc_bound_asymptotic", pick(bound)));
                for (design, sim) in &sims {
                    let (near, far) = sim.outage(cfg, m);
                    let ind = if k == 0 { near } else { far };
                    let est = MonteCarloEstimate::from_indicators(&ind, sim.discarded);
                    rows.push(CurveRow::simulated(snr, &metric, design.label(), &est));
                }
            }
        }
    }
    write_curves(&s.out.join("dl_op.csv"), &rows)?;
    Ok(())
}

fn report_containment(label: &str, r: &ContainmentReport) {
    println!(
        "{label}: {} (worst margin {:.3e} at sr = {:.6}, cr = {:.6}, {})",
        if r.passed { "contained" } else { "NOT contained" },
        r.worst_margin,
        r.worst_point.sr,
        r.worst_point.cr,
        r.worst_point.tag.sweep()
    );
}

pub fn dl_region(s: &Settings) -> Result<(), Failure> {
    let sc = scenario(s)?;
    let cfg = &sc.config;
    let batch = downlink_batch(s, &sc);
    let p = cfg.downlink_power;
    let isac = downlink_isac_region(cfg, &sc.corr, &batch, p, &uniform_grid(s.rho_grid))?;
    let fdsac = downlink_fdsac_region(cfg, &sc.corr, &batch, p, s.grid_step)?;
    write_regions(&s.out.join("dl_region.csv"), &[&isac, &fdsac])?;
    report_containment("downlink fdsac in isac", &check_containment(&fdsac, &isac)?);
    Ok(())
}

pub fn ul_rates(s: &Settings) -> Result<(), Failure> {
    let sc = scenario(s)?;
    let cfg = &sc.config;
    let l = cfg.frame_len;
    let split = sc.split()?;
    let batch = UplinkBatch::sample(cfg, s.experiment.seed, s.experiment.trials);
    let wave = sc_sensing_waveform(&sc.corr, cfg.uplink_sens_power, l, sc.spreading)?;
    let snrs = grid(s, (0.0, 5.0, 60.0));
    let (mut ecr, mut sr) = (Vec::new(), Vec::new());
    for &snr in &snrs {
        let p_c = db_to_linear(snr);
        let agg = UplinkAggregates::new(cfg, p_c);
        let slot_asym: Vec<f64> =
            wave.per_slot_sigma.iter().map(|&s2| uplink_sc_ecr_asymptotic(&agg, s2, p_c)).collect();
        ecr.push(CurveRow::exact(snr, "sum_ecr", "sc_closed", uplink_sc_ecr_frame(&agg, &wave.per_slot_sigma, p_c)));
        ecr.push(CurveRow::exact(snr, "sum_ecr", "sc_asymptotic", avg(&slot_asym, slot_asym.len())));
        ecr.push(CurveRow::exact(snr, "sum_ecr", "cc_closed", uplink_cc_ecr(&agg, p_c)));
        ecr.push(CurveRow::exact(snr, "sum_ecr", "cc_asymptotic", uplink_cc_ecr_asymptotic(&agg, p_c)));
        let fd = fdsac_ul_rates(&sc.corr, split.kappa, p_c, cfg.uplink_sens_power, l, &agg)?;
        ecr.push(CurveRow::exact(snr, "sum_ecr", "fdsac_closed", fd.1));
        for design in DESIGNS {
            let sim = simulate_uplink_batch(&sc, design, p_c, &batch)?;
            let est = MonteCarloEstimate::from_samples(&sim.sum_rate(), sim.discarded);
            ecr.push(CurveRow::simulated(snr, "sum_ecr", design.label(), &est));
        }
    }
    // Sensing rate against the sensing power, communication power held at its configured value.
    let agg = UplinkAggregates::new(cfg, cfg.uplink_comm_power);
    for &snr in &snrs {
        let p_s = db_to_linear(snr);
        sr.push(CurveRow::exact(snr, "sr", "sc", sc_sensing_waveform(&sc.corr, p_s, l, sc.spreading)?.sensing_rate));
        sr.push(CurveRow::exact(snr, "sr", "cc", cc_sensing(&sc.corr, p_s, l, &agg, sc.spreading)?.sensing_rate));
        let fd = fdsac_ul_rates(&sc.corr, split.kappa, cfg.uplink_comm_power, p_s, l, &agg)?;
        sr.push(CurveRow::exact(snr, "sr", "fdsac", fd.0));
    }
    write_curves(&s.out.join("ul_ecr.csv"), &ecr)?;
    write_curves(&s.out.join("ul_sr.csv"), &sr)?;
    Ok(())
}

pub fn ul_outage(s: &Settings) -> Result<(), Failure> {
    let sc = scenario(s)?;
    let cfg = &sc.config;
    let batch = UplinkBatch::sample(cfg, s.experiment.seed, s.experiment.trials);
    let wave = sc_sensing_waveform(&sc.corr, cfg.uplink_sens_power, cfg.frame_len, sc.spreading)?;
    let slots = wave.per_slot_sigma.len();
    let mut rows = Vec::new();
    for snr in grid(s, (0.0, 5.0, 40.0)) {
        let p_c = db_to_linear(snr);
        let agg = UplinkAggregates::new(cfg, p_c);
        let mut sc_closed = vec![0.0; cfg.pairs.len()];
        let mut sc_asym = vec![0.0; cfg.pairs.len()];
        for &s2 in &wave.per_slot_sigma {
            for (m, (c, a)) in uplink_sc_op(&agg, &cfg.pairs, s2, p_c)
                .into_iter()
                .zip(uplink_sc_op_asymptotic(&agg, &cfg.pairs, s2, p_c))
                .enumerate()
            {
                sc_closed[m] += c / slots as f64;
                sc_asym[m] += a / slots as f64;
            }
        }
        let cc_closed = uplink_cc_op(&agg, &cfg.pairs, p_c);
        let cc_asym = uplink_cc_op_asymptotic(&agg, &cfg.pairs, p_c);
        let sims = [
            simulate_uplink_batch(&sc, Design::SensingCentric, p_c, &batch)?,
            simulate_uplink_batch(&sc, Design::CommunicationsCentric, p_c, &batch)?,
        ];
        for m in 0..cfg.pairs.len() {
            let metric = format!("op_p{m}");
            rows.push(CurveRow::exact(snr, &metric, "sc_closed", sc_closed[m]));
            rows.push(CurveRow::exact(snr, &metric, "sc_asymptotic", sc_asym[m]));
            rows.push(CurveRow::exact(snr, &metric, "cc_closed", cc_closed[m]));
            rows.push(CurveRow::exact(snr, &metric, "cc_asymptotic", cc_asym[m]));
            for (label, sim) in ["sc", "cc"].into_iter().zip(&sims) {
                let est = MonteCarloEstimate::from_indicators(&sim.pair_outage[m], sim.discarded);
                rows.push(CurveRow::simulated(snr, &metric, label, &est));
            }
        }
    }
    write_curves(&s.out.join("ul_op.csv"), &rows)?;
    Ok(())
}

pub fn ul_region(s: &Settings) -> Result<(), Failure> {
    let sc = scenario(s)?;
    let cfg = &sc.config;
    let (isac, fdsac) = uplink_regions(
        cfg,
        &sc.corr,
        cfg.uplink_comm_power,
        cfg.uplink_sens_power,
        &uniform_grid(s.tau_grid),
        &step_grid(s.grid_step)?,
        sc.spreading,
    )?;
    write_regions(&s.out.join("ul_region.csv"), &[&isac, &fdsac])?;
    report_containment("uplink fdsac in isac", &check_containment(&fdsac, &isac)?);
    Ok(())
}

/// Writes `validation.csv`, prints the summary and returns the failure count.
pub fn validate(s: &Settings) -> Result<usize, Failure> {
    let sc = scenario(s)?;
    let options = ValidationOptions::new(s.experiment.trials, s.experiment.seed);
    let report = run_validation(&sc, &options)?;
    std::fs::write(s.out.join("validation.csv"), report.to_csv())?;
    print!("{}", report.summary());
    Ok(report.failures())
}
