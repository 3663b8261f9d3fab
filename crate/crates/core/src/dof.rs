//! Closed-form degrees-of-freedom analysis of the MIMO delivery scheme.
//!
//! With `Ω` users served per transmission and `β` streams decoded per user,
//! the per-user equivalent channel has rank at most
//! `min(G, (L - (Ω-t-1)β)·C(Ω-1, t))`, which caps `β` at
//! `min(G, L·C(Ω-1,t) / (1 + (Ω-t-1)·C(Ω-1,t)))`. The scheme's DoF is the
//! best `Ω·β` over admissible `Ω ∈ [t+1, t+L]`.

use serde::Serialize;

use crate::combinatorics::binomial;
use crate::error::{invalid, Error, Result};

/// One row of the per-`Ω` search table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BetaBoundRow {
    pub omega: usize,
    pub beta_bound: usize,
    pub dof: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DofSolution {
    pub omega_star: usize,
    pub beta_star: usize,
    pub dof: usize,
    pub beta_bound_trace: Vec<BetaBoundRow>,
}

/// Largest integer stream count per user allowed at `omega`; zero when no
/// stream fits.
pub fn beta_bound(l: usize, g: usize, t: usize, omega: usize) -> Result<usize> {
    if omega < t + 1 {
        return Err(invalid(format!("omega must be >= t+1 = {}, got {omega}", t + 1)));
    }
    let c = binomial(omega - 1, t);
    let num = l as u128 * c;
    let den = 1 + (omega - t - 1) as u128 * c;
    Ok((g as u128).min(num / den) as usize)
}

/// Rank cap on the per-user equivalent channel, clamped at zero.
pub fn rank_bound(l: usize, g: usize, t: usize, omega: usize, beta: usize) -> Result<usize> {
    if beta == 0 {
        return Err(invalid("beta must be >= 1"));
    }
    if omega < t + 1 {
        return Err(invalid(format!("omega must be >= t+1 = {}, got {omega}", t + 1)));
    }
    let spare = l as i128 - ((omega - t - 1) * beta) as i128;
    let rank = spare * binomial(omega - 1, t) as i128;
    Ok(rank.clamp(0, g as i128) as usize)
}

fn check_gains(l: usize, g: usize) -> Result<()> {
    if l == 0 || g == 0 {
        return Err(invalid(format!("L and G must be >= 1, got L={l} G={g}")));
    }
    Ok(())
}

fn row(l: usize, g: usize, t: usize, omega: usize) -> Result<BetaBoundRow> {
    let beta_bound = beta_bound(l, g, t, omega)?;
    Ok(BetaBoundRow { omega, beta_bound, dof: omega * beta_bound })
}

/// Exhaustive search over `Ω ∈ [t+1, t+L]`. Ties go to the smaller `Ω`,
/// which has the lower subpacketization.
pub fn dof_max(l: usize, g: usize, t: usize) -> Result<DofSolution> {
    check_gains(l, g)?;
    let trace = (t + 1..=t + l).map(|o| row(l, g, t, o)).collect::<Result<Vec<_>>>()?;
    // Ω = t+1 always admits β = min(G, L) >= 1
    debug_assert!(trace[0].beta_bound >= 1);
    let best = trace
        .iter()
        .filter(|r| r.beta_bound > 0)
        .fold(None::<&BetaBoundRow>, |best, r| match best {
            Some(b) if b.dof >= r.dof => Some(b),
            _ => Some(r),
        })
        .ok_or(Error::Infeasible { l, g, t })?;
    Ok(DofSolution {
        omega_star: best.omega,
        beta_star: best.beta_bound,
        dof: best.dof,
        beta_bound_trace: trace.clone(),
    })
}

/// DoF of the scheme when the served-user count is pinned to `omega`.
pub fn dof_at(l: usize, g: usize, t: usize, omega: usize) -> Result<DofSolution> {
    check_gains(l, g)?;
    if omega < t + 1 || omega > t + l {
        return Err(invalid(format!("omega must lie in [t+1, t+L] = [{}, {}], got {omega}", t + 1, t + l)));
    }
    let r = row(l, g, t, omega)?;
    if r.beta_bound == 0 {
        return Err(Error::Infeasible { l, g, t });
    }
    Ok(DofSolution { omega_star: omega, beta_star: r.beta_bound, dof: r.dof, beta_bound_trace: vec![r] })
}

/// Quick achievable-DoF metric obtained by fixing `β = G`:
/// `G·⌊(L-1)/G⌋ + G·(t+1)`.
pub fn dof_quick(l: usize, g: usize, t: usize) -> Result<usize> {
    check_gains(l, g)?;
    Ok(g * ((l - 1) / g) + g * (t + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_bound_examples() {
        assert_eq!(beta_bound(2, 2, 1, 2).unwrap(), 2);
        assert_eq!(beta_bound(2, 2, 1, 3).unwrap(), 1);
        assert_eq!(beta_bound(16, 4, 1, 7).unwrap(), 3);
        assert!(beta_bound(2, 2, 1, 1).is_err());
    }

    #[test]
    fn beta_bound_zero_when_infeasible() {
        // L=1, t=0, Ω=3: 1·1 / (1 + 2) < 1
        assert_eq!(beta_bound(1, 2, 0, 3).unwrap(), 0);
    }

    #[test]
    fn rank_bound_examples() {
        assert_eq!(rank_bound(2, 2, 2, 3, 2).unwrap(), 2);
        assert_eq!(rank_bound(2, 2, 1, 4, 1).unwrap(), 0);
        assert_eq!(rank_bound(3, 2, 1, 3, 2).unwrap(), 2);
        assert_eq!(rank_bound(2, 2, 1, 4, 3).unwrap(), 0);
        assert!(rank_bound(2, 2, 1, 3, 0).is_err());
    }

    #[test]
    fn dof_max_examples() {
        let s = dof_max(16, 4, 1).unwrap();
        assert_eq!((s.dof, s.omega_star, s.beta_star), (21, 7, 3));
        let s = dof_max(2, 2, 2).unwrap();
        assert_eq!((s.dof, s.omega_star, s.beta_star), (6, 3, 2));
        let s = dof_max(3, 2, 1).unwrap();
        assert_eq!((s.dof, s.omega_star, s.beta_star), (6, 3, 2));
        assert_eq!(s.beta_bound_trace.len(), 3);
    }

    #[test]
    fn dof_max_tie_prefers_smaller_omega() {
        // L=G=2, t=1: Ω=2 gives 4, Ω=3 gives 3
        let s = dof_max(2, 2, 1).unwrap();
        assert_eq!((s.omega_star, s.dof), (2, 4));
        // L=4, G=1, t=0: every Ω in 1..=4 reaches Ω·1, max at Ω=4; L=2,G=4,t=0 ties 2 = 1·2 = 2·1
        let s = dof_max(2, 4, 0).unwrap();
        assert_eq!((s.omega_star, s.beta_star, s.dof), (1, 2, 2));
    }

    #[test]
    fn dof_quick_examples() {
        assert_eq!(dof_quick(3, 2, 1).unwrap(), 6);
        assert_eq!(dof_quick(16, 4, 1).unwrap(), 20);
        assert_eq!(dof_quick(1, 1, 0).unwrap(), 1);
    }

    #[test]
    fn dof_at_rejects_out_of_range() {
        assert!(dof_at(2, 2, 1, 4).is_err());
        assert!(dof_at(2, 2, 1, 1).is_err());
        assert_eq!(dof_at(2, 2, 1, 3).unwrap().dof, 3);
    }

    #[test]
    fn beta_bound_at_minimal_omega_is_min_g_l() {
        for l in 1..=32 {
            for g in 1..=8 {
                for t in 0..=6 {
                    assert_eq!(beta_bound(l, g, t, t + 1).unwrap(), g.min(l));
                }
            }
        }
    }

    #[test]
    fn miso_dof_is_t_plus_l() {
        for l in 1..=32 {
            for t in 0..=6 {
                assert_eq!(dof_max(l, 1, t).unwrap().dof, t + l, "L={l} t={t}");
            }
        }
    }

    #[test]
    fn dof_max_monotone_in_each_argument() {
        for l in 1..=31 {
            for g in 1..=7 {
                for t in 0..=5 {
                    let d = dof_max(l, g, t).unwrap().dof;
                    assert!(dof_max(l + 1, g, t).unwrap().dof >= d);
                    assert!(dof_max(l, g + 1, t).unwrap().dof >= d);
                    assert!(dof_max(l, g, t + 1).unwrap().dof >= d);
                }
            }
        }
    }

    #[test]
    fn dof_max_dominates_quick_metric_when_beta_g_is_admissible() {
        let mut covered = 0;
        for l in 1..=32 {
            for g in 1..=8 {
                for t in 0..=6 {
                    let omega_g = t + 1 + (l - 1) / g;
                    if beta_bound(l, g, t, omega_g).unwrap() < g {
                        continue;
                    }
                    covered += 1;
                    assert!(dof_max(l, g, t).unwrap().dof >= dof_quick(l, g, t).unwrap());
                }
            }
        }
        assert_eq!(covered, 1409);
    }

    #[test]
    fn quick_metric_can_exceed_the_rank_constrained_optimum() {
        // β = G is not admissible at Ω = t+1+⌊(L-1)/G⌋ here
        assert_eq!(dof_quick(4, 3, 1).unwrap(), 9);
        assert_eq!(beta_bound(4, 3, 1, 3).unwrap(), 2);
        assert!(dof_max(4, 3, 1).unwrap().dof < 9);
    }
}
