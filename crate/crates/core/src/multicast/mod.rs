//! Multigroup multicast transmit-covariance design for one transmission.
//!
//! Every `(t+1)`-subset of the served users is a multicast group carrying one
//! codeword with its own transmit covariance. User `k` jointly decodes the
//! `m_k` codewords of its groups as a MAC and treats the rest as noise. The
//! symmetric per-codeword rate is raised by successive convex approximation:
//! the concave-minus-concave rate constraints are linearized in the
//! interference covariance and the resulting convex problem is solved with a
//! log-barrier interior-point method.

mod barrier;
mod covariance;
mod problem;
mod rate;
mod sca;
mod subproblem;
mod waterfill;

pub use barrier::{solve_subproblem, solve_subproblem_with, BarrierOptions};
pub use covariance::CovarianceSet;
pub use problem::MulticastProblem;
pub use rate::{exact_symmetric_rate, RateResult, UserBinding};
pub use sca::{remark1_solve, sca_solve, ScaConfig, ScaOutcome};
pub use subproblem::{build_sca_subproblem, ConvexSubproblem, SurrogateConstraint};
pub use waterfill::{waterfilling_capacity, waterfilling_powers};
