//! Downlink and uplink NOMA-ISAC with signal alignment.
//!
//! The crate is organised bottom-up:
//!
//! - [`mathkit`]: special functions and allocation solvers.
//! - [`channel`]: scenario configuration, sensing correlation and seeded channel draws.
//! - [`downlink`] and [`uplink`]: the ISAC designs, their rates and outage probabilities.
//! - [`fdsac`]: the frequency-division baseline.
//! - [`region`]: SR-CR rate regions and containment checks.
//! - [`montecarlo`]: trial loops, estimators and validation reports.

pub mod channel;
pub mod downlink;
mod error;
pub mod fdsac;
pub mod linalg;
pub mod mathkit;
pub mod montecarlo;
pub mod region;
pub mod uplink;

pub use error::{Error, Result};

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to dB.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
