use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{hermitian_defect, hermitian_part, CMatrix};
use crate::error::{Error, Result};

/// One `L×L` transmit covariance per multicast group, indexed like
/// [`MulticastProblem::groups`](super::MulticastProblem::groups).
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSet {
    pub mats: Vec<CMatrix>,
}

impl CovarianceSet {
    pub fn zeros(groups: usize, l: usize) -> Self {
        CovarianceSet { mats: vec![CMatrix::zeros(l, l); groups] }
    }

    /// `P / (groups·L) · I` for every group, spending the full budget.
    pub fn uniform(groups: usize, l: usize, power: f64) -> Self {
        let level = power / (groups * l) as f64;
        CovarianceSet { mats: vec![CMatrix::from_diagonal_element(l, l, Complex64::new(level, 0.0)); groups] }
    }

    /// Wishart-style random start, each group normalized to trace `P / groups`.
    pub fn random(groups: usize, l: usize, power: f64, seed: u64) -> Self {
        use rand::Rng;
        use rand_distr::StandardNormal;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let share = power / groups as f64;
        let mats = (0..groups)
            .map(|_| {
                let a = CMatrix::from_fn(l, l, |_, _| {
                    Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
                });
                let w = hermitian_part(&(&a * a.adjoint()));
                let tr = w.trace().re;
                w.scale(share / tr)
            })
            .collect();
        CovarianceSet { mats }
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn total_power(&self) -> f64 {
        self.mats.iter().map(|m| m.trace().re).sum()
    }

    /// Sum of the covariances of the listed groups.
    pub fn sum_of(&self, groups: &[usize], l: usize) -> CMatrix {
        let mut acc = CMatrix::zeros(l, l);
        for &g in groups {
            acc += &self.mats[g];
        }
        acc
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.mats
            .iter()
            .map(|m| SymmetricEigen::new(hermitian_part(m)).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks shape, Hermitian symmetry, PSD-ness (eigenvalues above
    /// `-1e-8·P`) and the power budget `Σ tr ≤ P·(1 + 1e-8)`.
    pub fn check_feasible(&self, groups: usize, l: usize, power: f64) -> Result<()> {
        if self.mats.len() != groups {
            return Err(Error::InvalidArgument(format!("expected {groups} covariances, got {}", self.mats.len())));
        }
        for (i, m) in self.mats.iter().enumerate() {
            if m.shape() != (l, l) {
                return Err(Error::InvalidArgument(format!("covariance {i} is not {l}x{l}")));
            }
            if hermitian_defect(m) > 1e-10 {
                return Err(Error::NumericDomain(format!("covariance {i} is not Hermitian")));
            }
        }
        let min = self.min_eigenvalue();
        if min < -1e-8 * power {
            return Err(Error::NumericDomain(format!("covariance has eigenvalue {min:.3e}")));
        }
        let total = self.total_power();
        if total > power * (1.0 + 1e-8) {
            return Err(Error::NumericDomain(format!("total power {total} exceeds budget {power}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_spends_full_budget() {
        let c = CovarianceSet::uniform(3, 2, 6.0);
        assert!((c.total_power() - 6.0).abs() < 1e-12);
        c.check_feasible(3, 2, 6.0).unwrap();
    }

    #[test]
    fn random_start_is_feasible_and_seeded() {
        let a = CovarianceSet::random(3, 4, 10.0, 9);
        let b = CovarianceSet::random(3, 4, 10.0, 9);
        assert_eq!(a, b);
        assert!((a.total_power() - 10.0).abs() < 1e-9);
        a.check_feasible(3, 4, 10.0).unwrap();
        assert!(a.min_eigenvalue() >= 0.0);
    }

    #[test]
    fn over_budget_is_rejected() {
        let c = CovarianceSet::uniform(2, 2, 4.0);
        assert!(c.check_feasible(2, 2, 3.0).is_err());
        assert!(c.check_feasible(3, 2, 4.0).is_err());
    }
}
