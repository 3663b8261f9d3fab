use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::seeds;

use super::{run_trial, ExperimentConfig, TrialOutcome};

pub const CSV_HEADER: &str = "snr_db,rsym_mean,rsym_stderr,trials_ok,trials_failed,mean_sca_iters";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatePoint {
    pub snr_db: f64,
    pub mean: f64,
    /// Standard error of the mean; zero with a single successful trial.
    pub stderr: f64,
    pub trials_ok: usize,
    pub trials_failed: usize,
    pub mean_sca_iters: f64,
    /// `R_sym` of each trial in trial order, `None` where the trial failed.
    /// Curves sharing a base seed and grid see the same channels at equal
    /// indices, which allows paired comparisons.
    pub samples: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateCurve {
    pub config: ExperimentConfig,
    pub points: Vec<RatePoint>,
}

/// How trials are scheduled. Results do not depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon work stealing; falls back to sequential without the `parallel` feature.
    Parallel,
}

fn trial_seed(base: u64, snr_index: usize, trial: usize) -> u64 {
    seeds::derive(base, &[snr_index as u64, trial as u64])
}

fn run_jobs(config: &ExperimentConfig, exec: Execution) -> Vec<Result<TrialOutcome>> {
    let jobs: Vec<(usize, usize)> =
        (0..config.snr_db.len()).flat_map(|s| (0..config.trials).map(move |t| (s, t))).collect();
    let job = |&(s, t): &(usize, usize)| run_trial(config, config.snr_db[s], trial_seed(config.base_seed, s, t));
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            jobs.par_iter().map(job).collect()
        }
        _ => jobs.iter().map(job).collect(),
    }
}

/// Sweeps the SNR grid with `trials` seeded trials per point.
pub fn rate_curve(config: &ExperimentConfig) -> Result<RateCurve> {
    rate_curve_with(config, Execution::Parallel)
}

pub fn rate_curve_with(config: &ExperimentConfig, exec: Execution) -> Result<RateCurve> {
    config.validate()?;
    let results = run_jobs(config, exec);
    let mut points = Vec::with_capacity(config.snr_db.len());
    for (s, chunk) in results.chunks(config.trials).enumerate() {
        let ok: Vec<&TrialOutcome> = chunk.iter().filter_map(|r| r.as_ref().ok()).collect();
        let failed = chunk.len() - ok.len();
        if ok.is_empty() {
            let first = chunk.iter().find_map(|r| r.as_ref().err()).map(|e| e.to_string());
            return Err(Error::SolverFailure {
                reason: format!(
                    "all {} trials failed at {} dB: {}",
                    chunk.len(),
                    config.snr_db[s],
                    first.unwrap_or_default()
                ),
                best: None,
            });
        }
        let n = ok.len() as f64;
        let mean = ok.iter().map(|o| o.rsym).sum::<f64>() / n;
        let stderr = if ok.len() > 1 {
            let var = ok.iter().map(|o| (o.rsym - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        let mean_sca_iters = ok.iter().map(|o| o.mean_iterations).sum::<f64>() / n;
        points.push(RatePoint {
            snr_db: config.snr_db[s],
            mean,
            stderr,
            trials_ok: ok.len(),
            trials_failed: failed,
            mean_sca_iters,
            samples: chunk.iter().map(|r| r.as_ref().ok().map(|o| o.rsym)).collect(),
        });
    }
    Ok(RateCurve { config: config.clone(), points })
}

/// `%.9g`-style formatting: 9 significant digits, trailing zeros dropped,
/// scientific notation outside `[1e-5, 1e9)`.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..9).contains(&exp) {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    let fixed = format!("{x:.decimals$}");
    if fixed.contains('.') {
        fixed.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        fixed
    }
}

impl RateCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                format_sig9(p.snr_db),
                format_sig9(p.mean),
                format_sig9(p.stderr),
                p.trials_ok,
                p.trials_failed,
                format_sig9(p.mean_sca_iters)
            );
        }
        out
    }

    pub fn point(&self, snr_db: f64) -> Option<&RatePoint> {
        self.points.iter().find(|p| (p.snr_db - snr_db).abs() < 1e-9)
    }
}

/// Finite-difference slope `ΔR_sym / Δlog2(SNR)` between two grid points,
/// i.e. rate gained per doubling of the SNR.
pub fn estimate_slope(curve: &RateCurve, lo_db: f64, hi_db: f64) -> Result<f64> {
    let lo = curve.point(lo_db).ok_or_else(|| invalid(format!("{lo_db} dB is not on the grid")))?;
    let hi = curve.point(hi_db).ok_or_else(|| invalid(format!("{hi_db} dB is not on the grid")))?;
    if hi_db <= lo_db {
        return Err(invalid("slope window must be increasing"));
    }
    let doublings = (hi_db - lo_db) / (10.0 * 2f64.log10());
    Ok((hi.mean - lo.mean) / doublings)
}
