use std::f64::consts::LOG2_E;

use crate::channel::{hermitian_part, logdet_hermitian_psd, CMatrix};
use crate::error::Result;

use super::{CovarianceSet, MulticastProblem};

/// Linearized lower bound on one MAC rate constraint `(k, B)`:
///
/// `R ≤ w·[log2|N0·I + H_k Σ_{B ∪ S̄_k} K_T H_kᴴ| - tr(A_k Σ_{S̄_k} K_T) + c_k]`
///
/// with `w = 1/|B|`, `A_k = log2(e)·H_kᴴ Q̄_k⁻¹ H_k` and
/// `c_k = tr(A_k Σ_{S̄_k} K̄_T) - log2|Q̄_k|` fixed at the expansion point.
#[derive(Debug, Clone)]
pub struct SurrogateConstraint {
    pub user: usize,
    pub subset: Vec<usize>,
    pub weight: f64,
    /// `B ∪ S̄_k`, sorted.
    pub logdet_groups: Vec<usize>,
    /// `S̄_k`.
    pub linear_groups: Vec<usize>,
    pub linear: CMatrix,
    pub constant: f64,
}

/// Convex subproblem solved at each SCA step: maximize `R` subject to every
/// surrogate constraint, `Σ tr K_T ≤ P_T` and `K_T ⪰ 0`.
#[derive(Debug, Clone)]
pub struct ConvexSubproblem<'a> {
    pub problem: &'a MulticastProblem,
    pub expansion: CovarianceSet,
    pub constraints: Vec<SurrogateConstraint>,
}

/// Linearizes every `(k, B)` rate constraint around `prev`.
pub fn build_sca_subproblem<'a>(problem: &'a MulticastProblem, prev: &CovarianceSet) -> Result<ConvexSubproblem<'a>> {
    let l = problem.tx_dim();
    let mut constraints = Vec::new();
    for k in 0..problem.served() {
        let h = problem.channel(k);
        let other = problem.interfering_groups(k);
        let q_bar = problem.interference_covariance(prev, k);
        let (linear, constant) = if other.is_empty() {
            (CMatrix::zeros(l, l), -logdet_hermitian_psd(&q_bar)?)
        } else {
            let q_inv = q_bar
                .clone()
                .cholesky()
                .ok_or_else(|| crate::Error::NumericDomain("interference covariance not PD".into()))?
                .inverse();
            let a = hermitian_part(&(h.adjoint() * q_inv * h)).scale(LOG2_E);
            let c = a.dotc(&prev.sum_of(other, l)).re - logdet_hermitian_psd(&q_bar)?;
            (a, c)
        };
        for subset in problem.enumerate_mac_subsets(k)? {
            let mut logdet_groups: Vec<usize> = subset.iter().chain(other).copied().collect();
            logdet_groups.sort_unstable();
            constraints.push(SurrogateConstraint {
                user: k,
                weight: 1.0 / subset.len() as f64,
                subset,
                logdet_groups,
                linear_groups: other.to_vec(),
                linear: linear.clone(),
                constant,
            });
        }
    }
    Ok(ConvexSubproblem { problem, expansion: prev.clone(), constraints })
}

impl SurrogateConstraint {
    /// Right-hand side of the constraint at `covs`.
    pub fn value(&self, problem: &MulticastProblem, covs: &CovarianceSet) -> Result<f64> {
        let h = problem.channel(self.user);
        let g = problem.rx_dim();
        let l = problem.tx_dim();
        let sum = covs.sum_of(&self.logdet_groups, l);
        let m = CMatrix::identity(g, g).scale(problem.n0()) + hermitian_part(&(h * sum * h.adjoint()));
        let lin = if self.linear_groups.is_empty() {
            0.0
        } else {
            // tr(A X) = Re Σ conj(A_ij) X_ij for Hermitian A, X
            self.linear.dotc(&covs.sum_of(&self.linear_groups, l)).re
        };
        Ok(self.weight * (logdet_hermitian_psd(&m)? - lin + self.constant))
    }
}

impl ConvexSubproblem<'_> {
    /// Number of inequality constraints: one per `(k, B)` plus the power budget.
    pub fn constraint_count(&self) -> usize {
        self.constraints.len() + 1
    }

    /// `min` over all surrogate constraints, the largest `R` feasible at `covs`.
    pub fn objective(&self, covs: &CovarianceSet) -> Result<f64> {
        let mut best = f64::INFINITY;
        for c in &self.constraints {
            best = best.min(c.value(self.problem, covs)?);
        }
        Ok(best)
    }

    /// True when no interference term is linearized (single multicast group),
    /// so the subproblem is exactly the original problem.
    pub fn is_interference_free(&self) -> bool {
        self.constraints.iter().all(|c| c.linear_groups.is_empty())
    }
}
