//! Cache placement, subpacketization and XOR delivery schedules.
//!
//! Users are indexed `0..K`. Every file is split into `C(K, t)` subfiles
//! indexed by the `t`-subsets `P` of users, and user `k` stores the subfile
//! `P` of every file whenever `k ∈ P`. Each subfile is further split into
//! `C(K - t - 1, Ω - t - 1)` subpackets so that every transmission carries
//! fresh data.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, subsets};
use crate::error::{invalid, Result};

/// Largest user count accepted by the combinatorial routines.
pub const MAX_USERS: usize = 32;

/// A scenario: user count, spatial multiplexing gains, caching gain and
/// power/noise levels (linear units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub k: usize,
    pub l: usize,
    pub g: usize,
    pub t: usize,
    pub n0: f64,
    pub power: f64,
}

impl SystemParams {
    pub fn new(k: usize, l: usize, g: usize, t: usize, n0: f64, power: f64) -> Result<Self> {
        let p = SystemParams { k, l, g, t, n0, power };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > MAX_USERS {
            return Err(invalid(format!("K must lie in [1, {MAX_USERS}], got {}", self.k)));
        }
        if self.t >= self.k {
            return Err(invalid(format!("t must satisfy 0 <= t < K, got t={} K={}", self.t, self.k)));
        }
        if self.l == 0 {
            return Err(invalid("L must be >= 1"));
        }
        if self.g == 0 {
            return Err(invalid("G must be >= 1"));
        }
        if !(self.n0.is_finite() && self.n0 > 0.0) {
            return Err(invalid(format!("N0 must be positive, got {}", self.n0)));
        }
        if !(self.power.is_finite() && self.power > 0.0) {
            return Err(invalid(format!("P_T must be positive, got {}", self.power)));
        }
        Ok(())
    }

    /// Codewords each served user must jointly decode per transmission, `C(Ω-1, t)`.
    pub fn mac_size(&self, omega: usize) -> usize {
        binomial(omega.saturating_sub(1), self.t) as usize
    }

    /// Largest admissible served-user count, `min(K, t + L)`.
    pub fn max_omega(&self) -> usize {
        self.k.min(self.t + self.l)
    }
}

fn check_omega(k: usize, t: usize, omega: usize) -> Result<()> {
    if k == 0 || k > MAX_USERS {
        return Err(invalid(format!("K must lie in [1, {MAX_USERS}], got {k}")));
    }
    if t >= k {
        return Err(invalid(format!("t must satisfy 0 <= t < K, got t={t} K={k}")));
    }
    if omega < t + 1 {
        return Err(invalid(format!("omega must be >= t+1 = {}, got {omega}", t + 1)));
    }
    if omega > k {
        return Err(invalid(format!("omega must be <= K = {k}, got {omega}")));
    }
    Ok(())
}

/// Subpacketization level `Θ = C(K, t)·C(K-t-1, Ω-t-1)`.
pub fn subpacketization(k: usize, t: usize, omega: usize) -> Result<u128> {
    check_omega(k, t, omega)?;
    Ok(binomial(k, t) * binomial(k - t - 1, omega - t - 1))
}

/// Subpackets per subfile, `C(K-t-1, Ω-t-1)`.
pub fn subpackets_per_subfile(k: usize, t: usize, omega: usize) -> Result<u128> {
    check_omega(k, t, omega)?;
    Ok(binomial(k - t - 1, omega - t - 1))
}

/// Which subfile indices each user stores (identically for every file).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementMap {
    k: usize,
    t: usize,
    cached: Vec<BTreeSet<Vec<usize>>>,
}

impl PlacementMap {
    pub fn users(&self) -> usize {
        self.k
    }

    pub fn caching_gain(&self) -> usize {
        self.t
    }

    /// Subfile indices `P` held by `user`, in lexicographic order.
    pub fn cached_sets(&self, user: usize) -> &BTreeSet<Vec<usize>> {
        &self.cached[user]
    }

    /// True when `user` stores subfile `cache_set` of every file.
    pub fn holds(&self, user: usize, cache_set: &[usize]) -> bool {
        self.cached.get(user).is_some_and(|s| s.contains(cache_set))
    }

    /// Cached fraction of each file at `user` as an exact ratio `(num, den)`.
    pub fn cached_fraction(&self, user: usize) -> (u128, u128) {
        (self.cached[user].len() as u128, binomial(self.k, self.t))
    }
}

/// Places subfile `P` of every file at each user `k ∈ P`.
pub fn build_placement(k: usize, t: usize) -> Result<PlacementMap> {
    if k == 0 || k > MAX_USERS {
        return Err(invalid(format!("K must lie in [1, {MAX_USERS}], got {k}")));
    }
    if t >= k {
        return Err(invalid(format!("t must satisfy 0 <= t < K, got t={t} K={k}")));
    }
    let users: Vec<usize> = (0..k).collect();
    let mut cached = vec![BTreeSet::new(); k];
    for p in subsets(&users, t) {
        for &u in &p {
            cached[u].insert(p.clone());
        }
    }
    Ok(PlacementMap { k, t, cached })
}

/// One subpacket `W_P^q` of the file requested by `file_owner`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SubpacketId {
    pub file_owner: usize,
    pub cache_set: Vec<usize>,
    /// 1-based subpacket index within the subfile.
    pub q: usize,
}

impl fmt::Display for SubpacketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W({})_{:?}^{}", self.file_owner, self.cache_set, self.q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodewordEntry {
    pub user: usize,
    pub subpacket: SubpacketId,
}

/// XOR of one subpacket per member of the multicast group `group`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    pub group: Vec<usize>,
    pub payload: Vec<CodewordEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmission {
    pub served: Vec<usize>,
    pub codewords: Vec<Codeword>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliverySchedule {
    pub k: usize,
    pub t: usize,
    pub omega: usize,
    pub theta: u128,
    pub transmissions: Vec<Transmission>,
}

/// Builds one transmission per `Ω`-subset of users and one codeword per
/// `(t+1)`-subset of each, both in lexicographic order. Subpacket indices
/// are handed out by per-`(user, cache_set)` counters.
pub fn build_schedule(params: &SystemParams, omega: usize) -> Result<DeliverySchedule> {
    params.validate()?;
    let (k, t) = (params.k, params.t);
    if omega < t + 1 || omega > params.max_omega() {
        return Err(invalid(format!(
            "omega must lie in [t+1, min(K, t+L)] = [{}, {}], got {omega}",
            t + 1,
            params.max_omega()
        )));
    }
    let theta = subpacketization(k, t, omega)?;
    let users: Vec<usize> = (0..k).collect();
    let mut counters: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    let mut transmissions = Vec::with_capacity(binomial(k, omega) as usize);
    for served in subsets(&users, omega) {
        let codewords = subsets(&served, t + 1)
            .into_iter()
            .map(|group| {
                let payload = group
                    .iter()
                    .map(|&u| {
                        let cache_set: Vec<usize> = group.iter().copied().filter(|&v| v != u).collect();
                        let q = counters.entry((u, cache_set.clone())).or_insert(0);
                        *q += 1;
                        CodewordEntry { user: u, subpacket: SubpacketId { file_owner: u, cache_set, q: *q } }
                    })
                    .collect();
                Codeword { group, payload }
            })
            .collect();
        transmissions.push(Transmission { served, codewords });
    }
    Ok(DeliverySchedule { k, t, omega, theta, transmissions })
}

/// Reason a schedule failed verification. Only the first problem found is kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerificationFailure {
    Mismatch(String),
    /// `user` cannot cancel `interference` because it is not in its cache.
    Undecodable {
        transmission: usize,
        codeword: usize,
        user: usize,
        interference: SubpacketId,
    },
    Duplicate {
        user: usize,
        subpacket: SubpacketId,
    },
    Unexpected {
        user: usize,
        subpacket: SubpacketId,
    },
    Missing {
        user: usize,
        subpacket: SubpacketId,
    },
}

impl fmt::Display for VerificationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Mismatch(m) => write!(f, "mismatch: {m}"),
            Self::Undecodable { transmission, codeword, user, interference } => write!(
                f,
                "user {user} cannot remove {interference} in codeword {codeword} of transmission {transmission}"
            ),
            Self::Duplicate { user, subpacket } => {
                write!(f, "user {user} receives {subpacket} more than once")
            }
            Self::Unexpected { user, subpacket } => {
                write!(f, "user {user} receives {subpacket} which it does not need")
            }
            Self::Missing { user, subpacket } => write!(f, "user {user} never receives {subpacket}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub passed: bool,
    /// Per user, the subpackets of its requested file it decoded.
    pub recovered: Vec<BTreeSet<SubpacketId>>,
    /// Files decoded per user, aligned with `recovered` via `demand`.
    pub demand: Vec<usize>,
    pub failure: Option<VerificationFailure>,
}

impl VerificationReport {
    fn fail(demand: &[usize], recovered: Vec<BTreeSet<SubpacketId>>, why: VerificationFailure) -> Self {
        VerificationReport { passed: false, recovered, demand: demand.to_vec(), failure: Some(why) }
    }
}

/// Simulates XOR decoding of every codeword at every group member and
/// checks that each user ends up with every subpacket it lacks exactly once.
///
/// `demand[k]` is the file requested by user `k`. Entries of a codeword are
/// identified by the requesting user, so repeated demands need no special
/// handling: a user cancels another member's entry whenever the matching
/// subfile is cached, whichever file it belongs to.
pub fn verify_decodability(
    schedule: &DeliverySchedule,
    placement: &PlacementMap,
    demand: &[usize],
) -> VerificationReport {
    let k = schedule.k;
    let mut recovered: Vec<BTreeSet<SubpacketId>> = vec![BTreeSet::new(); k];
    if placement.users() != k || placement.caching_gain() != schedule.t {
        return VerificationReport::fail(
            demand,
            recovered,
            VerificationFailure::Mismatch("placement and schedule use different (K, t)".into()),
        );
    }
    if demand.len() != k {
        return VerificationReport::fail(
            demand,
            recovered,
            VerificationFailure::Mismatch(format!("demand has {} entries, K = {k}", demand.len())),
        );
    }
    let per_subfile = match subpackets_per_subfile(k, schedule.t, schedule.omega) {
        Ok(v) => v as usize,
        Err(e) => return VerificationReport::fail(demand, recovered, VerificationFailure::Mismatch(e.to_string())),
    };

    for (ti, tx) in schedule.transmissions.iter().enumerate() {
        for (ci, cw) in tx.codewords.iter().enumerate() {
            for entry in &cw.payload {
                let user = entry.user;
                if user >= k {
                    return VerificationReport::fail(
                        demand,
                        recovered,
                        VerificationFailure::Mismatch(format!("user index {user} out of range")),
                    );
                }
                // every other entry must be cancellable from the cache
                for other in cw.payload.iter().filter(|o| o.user != user) {
                    if !placement.holds(user, &other.subpacket.cache_set) {
                        return VerificationReport::fail(
                            demand,
                            recovered,
                            VerificationFailure::Undecodable {
                                transmission: ti,
                                codeword: ci,
                                user,
                                interference: other.subpacket.clone(),
                            },
                        );
                    }
                }
                let sp = &entry.subpacket;
                let wanted = sp.file_owner == user
                    && sp.cache_set.len() == schedule.t
                    && !sp.cache_set.contains(&user)
                    && (1..=per_subfile).contains(&sp.q);
                if !wanted {
                    return VerificationReport::fail(
                        demand,
                        recovered,
                        VerificationFailure::Unexpected { user, subpacket: sp.clone() },
                    );
                }
                if !recovered[user].insert(sp.clone()) {
                    return VerificationReport::fail(
                        demand,
                        recovered,
                        VerificationFailure::Duplicate { user, subpacket: sp.clone() },
                    );
                }
            }
        }
    }

    let users: Vec<usize> = (0..k).collect();
    for user in 0..k {
        let others: Vec<usize> = users.iter().copied().filter(|&u| u != user).collect();
        for cache_set in subsets(&others, schedule.t) {
            for q in 1..=per_subfile {
                let sp = SubpacketId { file_owner: user, cache_set: cache_set.clone(), q };
                if !recovered[user].contains(&sp) {
                    return VerificationReport::fail(
                        demand,
                        recovered,
                        VerificationFailure::Missing { user, subpacket: sp },
                    );
                }
            }
        }
    }
    VerificationReport { passed: true, recovered, demand: demand.to_vec(), failure: None }
}

#[derive(Serialize)]
struct SubpacketJson<'a> {
    user: usize,
    cache_set: &'a [usize],
    q: usize,
}

#[derive(Serialize)]
struct TransmissionJson<'a> {
    served: &'a [usize],
    codewords: Vec<Vec<SubpacketJson<'a>>>,
}

#[derive(Serialize)]
struct ScheduleJson<'a> {
    #[serde(rename = "K")]
    k: usize,
    t: usize,
    omega: usize,
    theta: u128,
    transmissions: Vec<TransmissionJson<'a>>,
}

impl DeliverySchedule {
    /// JSON export: one object per transmission with its served set and
    /// codewords as arrays of `{user, cache_set, q}`.
    pub fn to_json(&self) -> serde_json::Value {
        let doc = ScheduleJson {
            k: self.k,
            t: self.t,
            omega: self.omega,
            theta: self.theta,
            transmissions: self
                .transmissions
                .iter()
                .map(|tx| TransmissionJson {
                    served: &tx.served,
                    codewords: tx
                        .codewords
                        .iter()
                        .map(|cw| {
                            cw.payload
                                .iter()
                                .map(|e| SubpacketJson {
                                    user: e.user,
                                    cache_set: &e.subpacket.cache_set,
                                    q: e.subpacket.q,
                                })
                                .collect()
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("schedule serializes")
    }
}
