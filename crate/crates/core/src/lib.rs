//! Cache-aided MIMO coded caching.
//!
//! * [`scheme`]: placement, subpacketization, XOR delivery schedules and a
//!   decodability checker.
//! * [`dof`]: degrees-of-freedom bounds and the search over served users.
//! * [`channel`]: seeded Rayleigh channels and Hermitian log-determinants.
//! * [`multicast`]: exact symmetric rate, SCA covariance design and
//!   water-filling.
//! * [`harness`]: Monte Carlo rate curves, CSV output and slope estimates.

pub mod channel;
pub mod combinatorics;
pub mod dof;
pub mod error;
pub mod harness;
pub mod multicast;
pub mod scheme;
pub mod seeds;

pub use error::{Error, Result};
