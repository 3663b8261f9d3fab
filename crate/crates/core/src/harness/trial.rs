use crate::channel::sample_channels;
use crate::combinatorics::subsets;
use crate::error::{Error, Result};
use crate::multicast::{remark1_solve, sca_solve, MulticastProblem, ScaConfig};
use crate::scheme::subpacketization;
use crate::seeds;

use super::ExperimentConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    /// `R_sym = K·Θ / Σ_i 1/R_i`, files per channel use.
    pub rsym: f64,
    /// Symmetric codeword rate `R_i` of each transmission, lexicographic in `K(i)`.
    pub rates: Vec<f64>,
    pub theta: u128,
    /// SCA iterations averaged over the transmissions.
    pub mean_iterations: f64,
}

/// One channel realization at `snr_db`: every `Ω`-subset of the `K_total`
/// users is optimized separately and the per-transmission rates are combined
/// into the symmetric rate.
pub fn run_trial(config: &ExperimentConfig, snr_db: f64, trial_seed: u64) -> Result<TrialOutcome> {
    config.validate()?;
    let params = config.params_at(snr_db)?;
    let theta = subpacketization(config.k_total, config.t, config.omega)?;
    let users: Vec<usize> = (0..config.k_total).collect();
    let channels = sample_channels(config.g, config.l, &users, trial_seed);

    let mut rates = Vec::new();
    let mut iterations = 0usize;
    for (i, served) in subsets(&users, config.omega).into_iter().enumerate() {
        let set = channels.select(&served).expect("served users were sampled");
        let problem = MulticastProblem::new(set, config.t, params.n0, params.power)?;
        let outcome = if config.omega == config.t + 1 {
            remark1_solve(&problem, config.sca.solver_tol)?
        } else {
            let sca = ScaConfig { base_seed: seeds::derive(trial_seed, &[i as u64]), ..config.sca };
            sca_solve(&problem, &sca)?
        };
        let rate = outcome.result.rate;
        if rate.is_nan() || rate <= 0.0 {
            return Err(Error::DegenerateTrial { transmission: i });
        }
        iterations += outcome.result.iterations;
        rates.push(rate);
    }
    let inverse_sum: f64 = rates.iter().map(|r| 1.0 / r).sum();
    let rsym = config.k_total as f64 * theta as f64 / inverse_sum;
    Ok(TrialOutcome { rsym, mean_iterations: iterations as f64 / rates.len() as f64, rates, theta })
}
