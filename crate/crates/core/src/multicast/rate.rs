use serde::Serialize;

use crate::channel::logdet_hermitian_psd;
use crate::error::Result;

use super::{CovarianceSet, MulticastProblem};

/// The MAC constraint that limits one user's symmetric rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserBinding {
    /// Served position of the user.
    pub user: usize,
    /// Group indices of the binding codeword subset `B`.
    pub subset: Vec<usize>,
    /// `(1/|B|)·log2|I + H_k Σ_B K_T H_kᴴ Q_k⁻¹|`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateResult {
    /// Symmetric per-codeword rate in bits per channel use.
    pub rate: f64,
    pub per_user: Vec<UserBinding>,
    pub iterations: usize,
    pub converged: bool,
    /// Subproblem objective after each SCA iteration.
    pub objective_trace: Vec<f64>,
}

impl RateResult {
    pub(crate) fn evaluation(rate: f64, per_user: Vec<UserBinding>) -> Self {
        RateResult { rate, per_user, iterations: 0, converged: true, objective_trace: Vec::new() }
    }
}

/// Largest common codeword rate inside every served user's MAC region.
///
/// For each user `k` and each non-empty `B ⊆ S_k` the sum of the `|B|`
/// codeword rates must not exceed `log2|I + H_k Σ_B K_T H_kᴴ Q_k⁻¹|`; with
/// all rates equal that is `R ≤ (1/|B|)·log2(…)`. Evaluated as
/// `log2|Q_k + H_k Σ_B K_T H_kᴴ| - log2|Q_k|`.
pub fn exact_symmetric_rate(problem: &MulticastProblem, covs: &CovarianceSet) -> Result<RateResult> {
    let mut per_user = Vec::with_capacity(problem.served());
    for k in 0..problem.served() {
        let base = logdet_hermitian_psd(&problem.interference_covariance(covs, k))?;
        let mut best: Option<UserBinding> = None;
        for subset in problem.enumerate_mac_subsets(k)? {
            let full = logdet_hermitian_psd(&problem.signal_plus_interference(covs, k, &subset))?;
            let value = ((full - base) / subset.len() as f64).max(0.0);
            if best.as_ref().is_none_or(|b| value < b.value) {
                best = Some(UserBinding { user: k, subset, value });
            }
        }
        per_user.push(best.expect("every user belongs to at least one group"));
    }
    let rate = per_user.iter().map(|b| b.value).fold(f64::INFINITY, f64::min);
    Ok(RateResult::evaluation(rate, per_user))
}
