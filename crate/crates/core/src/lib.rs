//! Exact privacy accounting for finite mechanisms.
//!
//! A [`Mechanism`] is a row-stochastic matrix from labelled inputs to
//! labelled outputs. On top of it the crate provides
//!
//! - exact audits ([`audit`]): replacement, deletion and central `(eps, delta)`
//!   via the hockey-stick divergence, pure budgets and trade-off curves;
//! - conversions between pure and approximate DP and randomized-response
//!   decompositions ([`converters`]);
//! - local-DP calculus ([`ldp`]): deletion versus replacement, trimming,
//!   symmetric compilation, grouposition, composition, purification bounds;
//! - exact shuffle-model audits and amplification bounds ([`shuffle`]);
//! - subsampling, both as a closed-form bound and as an explicit mixture
//!   ([`subsample`]);
//! - brute-force property suites ([`verify`]) and the `dpcalc` command line
//!   ([`cli`]).
//!
//! ```
//! use dpcalc::{audit_replacement_ldp, Mechanism};
//!
//! let rr = Mechanism::randomized_response(1.0).unwrap();
//! assert!(audit_replacement_ldp(&rr, 1.0).unwrap() < 1e-12);
//! assert!(audit_replacement_ldp(&rr, 0.5).unwrap() > 0.28);
//! ```
//!
//! The `examples/` directory has one runnable program per capability.

pub mod audit;
pub mod cli;
pub mod converters;
pub mod dist;
pub mod error;
pub mod ldp;
pub mod limits;
pub mod mechanism;
pub mod random;
pub mod shuffle;
pub mod subsample;
pub mod verify;

pub use audit::{
    audit_central, audit_deletion_ldp, audit_pure, audit_pure_central, audit_replacement_ldp,
    hockey_stick, tv_distance, NeighborPair, TradeoffCurve, TradeoffPoint,
};
pub use dist::{Dist, PrivacyBudget};
pub use error::{Error, Result};
pub use limits::EnumLimits;
pub use mechanism::Mechanism;
pub use shuffle::{audit_shuffle, CountVector, ShuffleAudit};
