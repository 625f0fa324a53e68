//! Almost-sure reachability for multiple-environment MDPs.
//!
//! A multiple-environment MDP ([`Memdp`]) is a finite family of MDPs sharing
//! one state and action space. The question is whether a single policy reaches
//! the target set with probability one in every member. This crate decides it
//! with a partial-exploration game solver ([`solver::find_policy`]), synthesizes
//! a finite-memory witness ([`BeliefFsc`]) and ships reference algorithms and
//! brute-force oracles ([`reference`]) to cross-check the result.

pub mod benchgen;
pub mod bomdp;
pub mod bsg;
pub mod envgraph;
pub mod envset;
pub mod error;
pub mod io;
pub mod mdp;
pub mod model;
pub mod policy;
pub mod reference;
pub mod region;
pub mod solver;

pub use bomdp::{Bomdp, ObsSet};
pub use bsg::{Bsg, Heuristic, SliceResult};
pub use envgraph::EnvGraph;
pub use envset::EnvSet;
pub use error::{FormatError, GenError, ModelError, PolicyError, SizeCapExceeded, SolveError};
pub use model::{Completion, Dist, Memdp, MemdpBuilder, Observation};
pub use policy::BeliefFsc;
pub use reference::VerifyReport;
pub use region::RegionStore;
pub use solver::{find_policy, BoundMode, SolveOptions, SolveOutcome, Verdict};
