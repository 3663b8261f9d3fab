use crate::channel::{hermitian_part, CMatrix, ChannelSet};
use crate::combinatorics::subsets;
use crate::error::{invalid, Error, Result};
use num_complex::Complex64;

use super::CovarianceSet;

/// Largest MAC size for which all `2^{m_k} - 1` rate constraints are built.
pub const MAX_MAC_SIZE: usize = 12;

/// Channels and multicast group structure of one transmission interval.
///
/// Users are referred to by their position in the served set; `users()`
/// maps positions back to global indices.
#[derive(Debug, Clone)]
pub struct MulticastProblem {
    users: Vec<usize>,
    channels: Vec<CMatrix>,
    t: usize,
    groups: Vec<Vec<usize>>,
    member: Vec<Vec<usize>>,
    other: Vec<Vec<usize>>,
    n0: f64,
    power: f64,
}

impl MulticastProblem {
    pub fn new(channels: ChannelSet, t: usize, n0: f64, power: f64) -> Result<Self> {
        let omega = channels.matrices.len();
        if omega == 0 {
            return Err(invalid("served set is empty"));
        }
        if t + 1 > omega {
            return Err(invalid(format!("need t+1 <= omega, got t={t} omega={omega}")));
        }
        let (g, l) = channels.matrices[0].shape();
        if g == 0 || l == 0 || channels.matrices.iter().any(|h| h.shape() != (g, l)) {
            return Err(invalid("channel matrices must share a non-empty G x L shape"));
        }
        if !(n0.is_finite() && n0 > 0.0) || !(power.is_finite() && power > 0.0) {
            return Err(invalid(format!("N0 and P_T must be positive, got {n0}, {power}")));
        }
        let positions: Vec<usize> = (0..omega).collect();
        let groups = subsets(&positions, t + 1);
        let member: Vec<Vec<usize>> =
            positions.iter().map(|k| (0..groups.len()).filter(|&i| groups[i].contains(k)).collect()).collect();
        let other: Vec<Vec<usize>> =
            positions.iter().map(|k| (0..groups.len()).filter(|&i| !groups[i].contains(k)).collect()).collect();
        Ok(MulticastProblem { users: channels.users, channels: channels.matrices, t, groups, member, other, n0, power })
    }

    pub fn users(&self) -> &[usize] {
        &self.users
    }

    pub fn served(&self) -> usize {
        self.channels.len()
    }

    pub fn channel(&self, k: usize) -> &CMatrix {
        &self.channels[k]
    }

    pub fn caching_gain(&self) -> usize {
        self.t
    }

    pub fn tx_dim(&self) -> usize {
        self.channels[0].ncols()
    }

    pub fn rx_dim(&self) -> usize {
        self.channels[0].nrows()
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    /// Multicast groups `S`: all `(t+1)`-subsets of served positions.
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Indices of the groups containing `k` (`S_k`).
    pub fn member_groups(&self, k: usize) -> &[usize] {
        &self.member[k]
    }

    /// Indices of the groups not containing `k` (`S̄_k`).
    pub fn interfering_groups(&self, k: usize) -> &[usize] {
        &self.other[k]
    }

    pub fn mac_size(&self, k: usize) -> usize {
        self.member[k].len()
    }

    /// Same problem with the transmit power budget replaced.
    pub fn with_power(&self, power: f64) -> Self {
        MulticastProblem { power, ..self.clone() }
    }

    /// Non-empty subsets of `S_k`, as group indices, ordered by bitmask over
    /// `member_groups(k)`.
    pub fn enumerate_mac_subsets(&self, k: usize) -> Result<Vec<Vec<usize>>> {
        if k >= self.served() {
            return Err(invalid(format!("user position {k} not in served set")));
        }
        let member = &self.member[k];
        let m = member.len();
        if m > MAX_MAC_SIZE {
            return Err(Error::TooManyMacSubsets(m));
        }
        Ok((1u32..(1u32 << m))
            .map(|mask| (0..m).filter(|i| mask & (1 << i) != 0).map(|i| member[i]).collect())
            .collect())
    }

    /// `N0·I + H_k (Σ_{T∈S̄_k} K_T) H_kᴴ`.
    pub fn interference_covariance(&self, covs: &CovarianceSet, k: usize) -> CMatrix {
        let g = self.rx_dim();
        let noise = CMatrix::from_diagonal_element(g, g, Complex64::new(self.n0, 0.0));
        let other = &self.other[k];
        if other.is_empty() {
            return noise;
        }
        let h = &self.channels[k];
        let sum = covs.sum_of(other, self.tx_dim());
        noise + hermitian_part(&(h * sum * h.adjoint()))
    }

    /// `Q_k + H_k (Σ_{T∈B} K_T) H_kᴴ`, the received covariance seen when
    /// decoding the codewords in `subset`.
    pub(crate) fn signal_plus_interference(&self, covs: &CovarianceSet, k: usize, subset: &[usize]) -> CMatrix {
        let h = &self.channels[k];
        let sum = covs.sum_of(subset, self.tx_dim());
        self.interference_covariance(covs, k) + hermitian_part(&(h * sum * h.adjoint()))
    }
}
