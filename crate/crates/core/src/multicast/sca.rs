use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{hermitian_part, CMatrix};

use crate::error::{Error, Result};

use super::{
    build_sca_subproblem, exact_symmetric_rate, solve_subproblem, CovarianceSet, MulticastProblem, RateResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaConfig {
    /// Stop once successive subproblem objectives differ by at most this (bits).
    pub er_sca: f64,
    pub max_iter: usize,
    /// Number of starting points; the first is the scaled identity, the rest
    /// are seeded random.
    pub restarts: usize,
    pub base_seed: u64,
    /// Duality-gap target of each convex solve (bits).
    pub solver_tol: f64,
    /// Linearize at an extrapolated point `K + γ(K - K_prev)` whenever its
    /// exact rate is no worse than that of the current iterate.
    pub extrapolate: bool,
}

impl Default for ScaConfig {
    fn default() -> Self {
        ScaConfig { er_sca: 1e-4, max_iter: 200, restarts: 1, base_seed: 0, solver_tol: 1e-5, extrapolate: true }
    }
}

#[derive(Debug, Clone)]
pub struct ScaOutcome {
    /// Exact symmetric rate at `covariances`, with SCA bookkeeping.
    pub result: RateResult,
    pub covariances: CovarianceSet,
    /// Exact rate at the starting point of the winning restart.
    pub initial_rate: f64,
}

fn restart_seed(base: u64, restart: usize) -> u64 {
    crate::seeds::derive(base, &[0x5ca, restart as u64])
}

const GAMMA_START: f64 = 0.5;
const GAMMA_MAX: f64 = 8.0;

/// `K + γ(K - K_prev)` with negative eigenvalues clipped and the total power
/// scaled back into the budget.
fn extrapolated(current: &CovarianceSet, previous: &CovarianceSet, gamma: f64, power: f64) -> CovarianceSet {
    let mats: Vec<_> = current
        .mats
        .iter()
        .zip(&previous.mats)
        .map(|(k, old)| {
            let step = hermitian_part(&(k + (k - old).scale(gamma)));
            let eig = SymmetricEigen::new(step);
            let clipped = eig.eigenvalues.map(|v| Complex64::new(v.max(0.0), 0.0));
            hermitian_part(&(&eig.eigenvectors * CMatrix::from_diagonal(&clipped) * eig.eigenvectors.adjoint()))
        })
        .collect();
    let mut out = CovarianceSet { mats };
    let total = out.total_power();
    if total > power {
        let s = power / total;
        out.mats.iter_mut().for_each(|m| *m = m.scale(s));
    }
    out
}

fn run_restart(problem: &MulticastProblem, config: &ScaConfig, start: CovarianceSet) -> Result<ScaOutcome> {
    let initial_rate = exact_symmetric_rate(problem, &start)?.rate;
    let mut current = start;
    let mut current_rate = initial_rate;
    let mut last: Option<CovarianceSet> = None;
    let mut gamma = GAMMA_START;
    let mut previous = initial_rate;
    let mut trace = Vec::new();
    let mut converged = false;
    for _ in 0..config.max_iter {
        let mut expansion = None;
        if let (true, Some(old)) = (config.extrapolate, last.as_ref()) {
            let cand = extrapolated(&current, old, gamma, problem.power());
            if exact_symmetric_rate(problem, &cand)?.rate >= current_rate {
                gamma = (gamma * 2.0).min(GAMMA_MAX);
                expansion = Some(cand);
            } else {
                gamma = (gamma * 0.5).max(GAMMA_START);
            }
        }
        let sub = build_sca_subproblem(problem, expansion.as_ref().unwrap_or(&current))?;
        let step = solve_subproblem(&sub, config.solver_tol);
        let (next, value) = match step {
            Ok(v) => v,
            // keep the last good iterate once the loop is under way
            Err(Error::SolverFailure { .. }) if !trace.is_empty() => break,
            Err(e) => return Err(e),
        };
        trace.push(value);
        last = Some(std::mem::replace(&mut current, next));
        current_rate = exact_symmetric_rate(problem, &current)?.rate;
        if (value - previous).abs() <= config.er_sca {
            converged = true;
            break;
        }
        previous = value;
    }
    let mut result = exact_symmetric_rate(problem, &current)?;
    result.iterations = trace.len();
    result.converged = converged;
    result.objective_trace = trace;
    Ok(ScaOutcome { result, covariances: current, initial_rate })
}

/// Successive convex approximation of the symmetric-rate problem.
///
/// Each restart iterates linearize/solve until the subproblem objective moves
/// by at most `er_sca`; the reported rate is the exact symmetric rate at the
/// final covariances. The best restart wins.
pub fn sca_solve(problem: &MulticastProblem, config: &ScaConfig) -> Result<ScaOutcome> {
    let (groups, l, power) = (problem.groups().len(), problem.tx_dim(), problem.power());
    let mut best: Option<ScaOutcome> = None;
    let mut failures = Vec::new();
    for r in 0..config.restarts.max(1) {
        let start = if r == 0 {
            CovarianceSet::uniform(groups, l, power)
        } else {
            CovarianceSet::random(groups, l, power, restart_seed(config.base_seed, r))
        };
        match run_restart(problem, config, start) {
            Ok(o) => {
                if best.as_ref().is_none_or(|b| o.result.rate > b.result.rate) {
                    best = Some(o);
                }
            }
            Err(e) => failures.push(format!("restart {r}: {e}")),
        }
    }
    best.ok_or_else(|| Error::SolverFailure { reason: failures.join("; "), best: None })
}

/// Single convex solve for one multicast group (`Ω = t + 1`):
/// maximize `min_k log2|I + H_k K H_kᴴ / N0|` subject to `tr K ≤ P_T`.
pub fn remark1_solve(problem: &MulticastProblem, tol: f64) -> Result<ScaOutcome> {
    if problem.groups().len() != 1 {
        return Err(Error::InvalidArgument(format!(
            "single-group solve needs omega = t+1, problem has {} groups",
            problem.groups().len()
        )));
    }
    let start = CovarianceSet::uniform(1, problem.tx_dim(), problem.power());
    let initial_rate = exact_symmetric_rate(problem, &start)?.rate;
    let sub = build_sca_subproblem(problem, &start)?;
    debug_assert!(sub.is_interference_free());
    let (covs, value) = solve_subproblem(&sub, tol)?;
    let mut result = exact_symmetric_rate(problem, &covs)?;
    result.iterations = 1;
    result.converged = true;
    result.objective_trace = vec![value];
    Ok(ScaOutcome { result, covariances: covs, initial_rate })
}
