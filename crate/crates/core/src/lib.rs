//! Exact enumeration of consecutive permutation patterns.
//!
//! The crate computes occurrence statistics of a consecutive pattern, its
//! cluster numbers (as linear-extension counts of cluster posets), the
//! cluster-method generating function, and partitions `S_m` into c-Wilf,
//! strong and super-strong c-Wilf equivalence classes up to a finite
//! horizon. All counts are exact arbitrary-precision integers.

pub mod asymptotics;
pub mod bigmath;
pub mod cache;
pub mod clusterengine;
pub mod clusterposet;
pub mod equivalence;
mod error;
pub mod gfseries;
pub mod oracle;
pub mod permcore;

pub use error::{Error, Result};

pub use num_bigint::{BigInt, BigUint};

pub use cache::{CacheKey, CountCache};
pub use clusterengine::ClusterEngine;
pub use clusterposet::{ClusterPoset, CountConfig, MarkSet};
pub use equivalence::{EquivalenceReport, Level};
pub use gfseries::TruncatedSeries;
pub use permcore::{OccurrenceSet, OverlapSet, Permutation, Symmetry};
