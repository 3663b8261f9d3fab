//! Monte Carlo driver: scenario configuration, trials, rate curves, CSV
//! output and high-SNR slope estimates.

mod config;
mod curve;
mod trial;

pub use config::{ConfigFile, ExperimentConfig};
pub use curve::{
    estimate_slope, format_sig9, rate_curve, rate_curve_with, Execution, RateCurve, RatePoint, CSV_HEADER,
};
pub use trial::{run_trial, TrialOutcome};
