//! Finite matroids given by independence oracles, the connectivity function
//! `κ` defined through bases, and Tutte's linking theorem, with windowed
//! presentations of infinite finitary matroids.
//!
//! Ground sets hold at most 64 labelled elements; sets are bitmasks over
//! them. Every exhaustive search is bounded by a [`Budget`].

pub mod axioms;
pub mod config;
pub mod connectivity;
pub mod constructions;
pub mod corpus;
pub mod error;
pub mod format;
pub mod linking;
pub mod matroid;
pub mod repr;
pub mod set;
pub mod windows;

pub use config::Budget;
pub use connectivity::{ConnValue, Separation};
pub use constructions::{ComponentPartition, MinorSpec};
pub use error::{MatroidError, Result};
pub use linking::LinkingResult;
pub use matroid::{Circuit, Matroid, Representation};
pub use set::{ElementSet, GroundSet};
pub use windows::InfiniteFamily;
