use std::path::Path;

use noma_isac::montecarlo::MonteCarloEstimate;
use noma_isac::region::{RatePoint, RateRegion};

pub const CURVE_HEADER: [&str; 6] = ["snr_db", "metric", "design", "value", "stderr", "trials"];
pub const REGION_HEADER: [&str; 6] = ["region", "design", "sweep", "sr", "cr", "on_hull"];

/// One point of a curve. Closed forms leave `stderr` and `trials` empty.
#[derive(Debug, Clone)]
pub struct CurveRow {
    pub snr_db: f64,
    pub metric: String,
    pub design: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub trials: Option<u64>,
}

impl CurveRow {
    pub fn exact(snr_db: f64, metric: impl Into<String>, design: impl Into<String>, value: f64) -> Self {
        Self { snr_db, metric: metric.into(), design: design.into(), value, stderr: None, trials: None }
    }

    pub fn simulated(snr_db: f64, metric: impl Into<String>, design: impl Into<String>, est: &MonteCarloEstimate) -> Self {
        Self {
            snr_db,
            metric: metric.into(),
            design: design.into(),
            value: est.mean,
            stderr: Some(est.stderr),
            trials: Some(est.trials),
        }
    }
}

pub fn write_curves(path: &Path, rows: &[CurveRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CURVE_HEADER)?;
    for r in rows {
        w.write_record([
            r.snr_db.to_string(),
            r.metric.clone(),
            r.design.clone(),
            r.value.to_string(),
            r.stderr.map(|v| v.to_string()).unwrap_or_default(),
            r.trials.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_regions(path: &Path, regions: &[&RateRegion]) -> csv::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(REGION_HEADER)?;
    for region in regions {
        for p in &region.points {
            let on_hull = region.hull.iter().any(|h: &RatePoint| h.tag == p.tag);
            w.write_record([
                region.name.clone(),
                p.tag.design().to_string(),
                p.tag.sweep(),
                p.sr.to_string(),
                p.cr.to_string(),
                on_hull.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
