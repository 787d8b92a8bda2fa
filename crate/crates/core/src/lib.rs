//! Give-and-take segment exchange.
//!
//! A group of `m` nodes each holds a subset of a universe of `n` segments.
//! Two nodes may exchange only when each holds something the other lacks,
//! and an exchange leaves both with the union of their sets. This crate
//! models that system ([`model`]), provides five scheduling heuristics
//! ([`algorithms`]), an exact search for the schedule with the largest
//! aggregate cardinality ([`oracle`]), closed-form coverage and lower-bound
//! quantities ([`analysis`]) and a seeded benchmarking harness ([`harness`]).
//!
//! Internally nodes and segments are 0-based. The file formats in [`io`]
//! and everything printed for people are 1-based.

pub mod algorithms;
pub mod analysis;
pub mod error;
pub mod harness;
pub mod io;
pub mod model;
pub mod oracle;
pub mod segset;

#[cfg(test)]
mod test_support;

pub use algorithms::{Algorithm, AlgorithmRun, TieRule};
pub use error::{Error, Result};
pub use model::{
    apply_schedule, upper_bound, Instance, Link, Schedule, Step, SystemState, Validation,
};
pub use segset::SegmentSet;
