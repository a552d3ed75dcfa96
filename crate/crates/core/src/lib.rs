//! Exact orbit counting for pseudogroups generated by isometries between
//! integer intervals.
//!
//! A [`PairingSystem`] holds pairings on `[1, n]`. [`count_orbits`] returns the
//! number of orbits in time polynomial in `k log n`, and [`weighted_count`]
//! additionally reports, for every orbit, the sum of per-point weight vectors.
//! The brute-force [`oracle`] module gives reference answers for small `n`.

mod coord;
mod coverage;
mod engine;
mod error;
mod interval;
pub mod oracle;
mod system;
mod weights;

pub use coord::Coord;
pub use engine::{count_orbits, count_orbits_traced, run, weighted_count, RunOptions, RunOutcome, Trace, TraceRow};
pub use error::{OrbitError, Result};
pub use interval::{apply, is_periodic, merge_periodic, periodic_interval, transmit, trim, Interval, Pairing};
pub use oracle::{count_orbits_oracle, weighted_count_oracle};
pub use system::{complexity_x, contract, maximal_pairing, truncate, PairingSystem};
pub use weights::{transfer, OrbitWeightReport, WeightList, WeightVec};
