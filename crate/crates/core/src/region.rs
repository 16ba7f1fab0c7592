//! SR-CR rate regions and containment checks.
//!
//! A region is the dominated closure of its points: everything coordinatewise
//! below some point. Only the Pareto-maximal staircase is needed to test
//! membership.

use crate::channel::{SensingCorrelation, SystemConfig};
use crate::downlink::{pareto_design, DownlinkBatch};
use crate::error::{Error, Result};
use crate::fdsac::{fdsac_dl_ecr_samples, fdsac_dl_sr, fdsac_ul_rates, FdsacSplit};
use crate::uplink::{
    cc_sensing, sc_sensing_waveform, time_share_point, uplink_cc_ecr, uplink_sc_ecr_frame, Spreading,
    UplinkAggregates,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointTag {
    Pareto { rho: f64 },
    TimeShare { tau: f64 },
    DownlinkFdsac { kappa: f64, mu: f64 },
    UplinkFdsac { kappa: f64 },
}

impl PointTag {
    pub fn design(&self) -> &'static str {
        match self {
            PointTag::Pareto { .. } => "isac_pareto",
            PointTag::TimeShare { .. } => "isac_timeshare",
            PointTag::DownlinkFdsac { .. } | PointTag::UplinkFdsac { .. } => "fdsac",
        }
    }

    /// Sweep parameters as `name=value` pairs joined by `;`.
    pub fn sweep(&self) -> String {
        match self {
            PointTag::Pareto { rho } => format!("rho={rho:.4}"),
            PointTag::TimeShare { tau } => format!("tau={tau:.4}"),
            PointTag::DownlinkFdsac { kappa, mu } => format!("kappa={kappa:.4};mu={mu:.4}"),
            PointTag::UplinkFdsac { kappa } => format!("kappa={kappa:.4}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub sr: f64,
    pub cr: f64,
    pub tag: PointTag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRegion {
    pub name: String,
    pub points: Vec<RatePoint>,
    /// Pareto-maximal points by increasing SR.
    pub hull: Vec<RatePoint>,
}

impl RateRegion {
    pub fn from_points(name: impl Into<String>, points: Vec<RatePoint>) -> Self {
        let mut sorted = points.clone();
        sorted.sort_by(|a, b| b.sr.total_cmp(&a.sr).then(b.cr.total_cmp(&a.cr)));
        let mut hull: Vec<RatePoint> = Vec::new();
        for p in sorted {
            if hull.last().is_none_or(|h| p.cr > h.cr) {
                hull.push(p);
            }
        }
        hull.reverse();
        Self { name: name.into(), points, hull }
    }

    pub fn contains_point(&self, point: &RatePoint) -> bool {
        self.hull.iter().any(|h| h.sr >= point.sr && h.cr >= point.cr)
    }

    pub fn max_sr(&self) -> f64 {
        self.points.iter().map(|p| p.sr).fold(0.0, f64::max)
    }

    pub fn max_cr(&self) -> f64 {
        self.points.iter().map(|p| p.cr).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentReport {
    pub passed: bool,
    /// Smallest over inner points of the best normalised clearance
    /// `min((h.sr - q.sr)/SR_max, (h.cr - q.cr)/CR_max)` to an outer hull point.
    pub worst_margin: f64,
    pub worst_point: RatePoint,
}

/// Relative tolerance on the normalised margin.
pub const CONTAINMENT_TOL: f64 = 1e-6;

pub fn check_containment(inner: &RateRegion, outer: &RateRegion) -> Result<ContainmentReport> {
    if inner.points.is_empty() {
        return Err(Error::EmptyRegion(inner.name.clone()));
    }
    if outer.hull.is_empty() {
        return Err(Error::EmptyRegion(outer.name.clone()));
    }
    let s_sr = outer.max_sr().max(inner.max_sr()).max(f64::MIN_POSITIVE);
    let s_cr = outer.max_cr().max(inner.max_cr()).max(f64::MIN_POSITIVE);
    let mut worst: Option<(f64, RatePoint)> = None;
    for q in &inner.points {
        let margin = outer
            .hull
            .iter()
            .map(|h| ((h.sr - q.sr) / s_sr).min((h.cr - q.cr) / s_cr))
            .fold(f64::NEG_INFINITY, f64::max);
        if worst.is_none_or(|(w, _)| margin < w) {
            worst = Some((margin, *q));
        }
    }
    let (worst_margin, worst_point) = worst.expect("nonempty");
    Ok(ContainmentReport { passed: worst_margin >= -CONTAINMENT_TOL, worst_margin, worst_point })
}

/// `n` points evenly spaced on `[0, 1]`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

/// `0, step, 2 step, ..., 1`.
pub fn step_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::param("grid_step", format!("must lie in (0, 1], got {step}")));
    }
    let n = (1.0 / step).round() as usize;
    Ok(uniform_grid(n + 1))
}

pub fn downlink_isac_region(
    config: &SystemConfig,
    corr: &SensingCorrelation,
    batch: &DownlinkBatch,
    p: f64,
    rho_grid: &[f64],
) -> Result<RateRegion> {
    let points = rho_grid
        .iter()
        .map(|&rho| {
            let pt = pareto_design(config, corr, batch, p, rho)?;
            Ok(RatePoint { sr: pt.sensing_rate, cr: pt.comm_rate, tag: PointTag::Pareto { rho } })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateRegion::from_points("downlink_isac", points))
}

pub fn downlink_fdsac_region(
    config: &SystemConfig,
    corr: &SensingCorrelation,
    batch: &DownlinkBatch,
    p: f64,
    grid_step: f64,
) -> Result<RateRegion> {
    if batch.is_empty() {
        return Err(Error::param("batch", "needs at least one realization"));
    }
    let grid = step_grid(grid_step)?;
    let mut points = Vec::with_capacity(grid.len() * grid.len());
    for &kappa in &grid {
        for &mu in &grid {
            let split = FdsacSplit::new(kappa, mu)?;
            let sr = fdsac_dl_sr(corr, split, p, config.frame_len)?;
            let samples = fdsac_dl_ecr_samples(config, batch, split, p);
            let cr = samples.iter().sum::<f64>() / samples.len() as f64;
            points.push(RatePoint { sr, cr, tag: PointTag::DownlinkFdsac { kappa, mu } });
        }
    }
    Ok(RateRegion::from_points("downlink_fdsac", points))
}

/// Uplink `(ISAC, FDSAC)` regions: time sharing between the two SIC orders
/// against a bandwidth split.
pub fn uplink_regions(
    config: &SystemConfig,
    corr: &SensingCorrelation,
    p_c: f64,
    p_s: f64,
    tau_grid: &[f64],
    kappa_grid: &[f64],
    spreading: Spreading,
) -> Result<(RateRegion, RateRegion)> {
    let l = config.frame_len;
    let agg = UplinkAggregates::new(config, p_c);
    let sc = sc_sensing_waveform(corr, p_s, l, spreading)?;
    let cc = cc_sensing(corr, p_s, l, &agg, spreading)?;
    let sc_point = (sc.sensing_rate, uplink_sc_ecr_frame(&agg, &sc.per_slot_sigma, p_c));
    let cc_point = (cc.sensing_rate, uplink_cc_ecr(&agg, p_c));
    let isac = tau_grid
        .iter()
        .map(|&tau| {
            let (sr, cr) = time_share_point(tau, sc_point, cc_point);
            RatePoint { sr, cr, tag: PointTag::TimeShare { tau } }
        })
        .collect();
    let fdsac = kappa_grid
        .iter()
        .map(|&kappa| {
            let (sr, cr) = fdsac_ul_rates(corr, kappa, p_c, p_s, l, &agg)?;
            Ok(RatePoint { sr, cr, tag: PointTag::UplinkFdsac { kappa } })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((RateRegion::from_points("uplink_isac", isac), RateRegion::from_points("uplink_fdsac", fdsac)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(sr: f64, cr: f64) -> RatePoint {
        RatePoint { sr, cr, tag: PointTag::TimeShare { tau: 0.0 } }
    }

    #[test]
    fn hull_keeps_maximal_points() {
        let r = RateRegion::from_points("r", vec![pt(1.0, 3.0), pt(2.0, 2.0), pt(1.5, 1.0), pt(3.0, 0.5), pt(2.0, 2.0)]);
        let hull: Vec<(f64, f64)> = r.hull.iter().map(|p| (p.sr, p.cr)).collect();
        assert_eq!(hull, vec![(1.0, 3.0), (2.0, 2.0), (3.0, 0.5)]);
        assert!(r.contains_point(&pt(1.5, 1.0)));
        assert!(!r.contains_point(&pt(2.5, 1.0)));
    }

    #[test]
    fn empty_region_is_an_error() {
        let full = RateRegion::from_points("full", vec![pt(1.0, 1.0)]);
        let empty = RateRegion::from_points("empty", vec![]);
        assert!(matches!(check_containment(&empty, &full), Err(Error::EmptyRegion(_))));
        assert!(matches!(check_containment(&full, &empty), Err(Error::EmptyRegion(_))));
    }

    #[test]
    fn grids() {
        assert_eq!(uniform_grid(3), vec![0.0, 0.5, 1.0]);
        assert_eq!(step_grid(0.25).unwrap().len(), 5);
        assert_eq!(*step_grid(0.05).unwrap().last().unwrap(), 1.0);
        assert!(step_grid(0.0).is_err());
    }
}
