//! Reference algorithms and oracles used to cross-check the solver.

mod brute;
mod crosscheck;
mod game;
mod recursive;
mod verify;

pub use brute::brute_force_decide;
pub use crosscheck::{crosscheck_seed, CrosscheckConfig, CrosscheckRecord};
pub use game::win_sg_brute_force;
pub use recursive::{as_winning_recursive, search_recursive, search_recursive_with_budget};
pub use verify::{verify_policy, EnvVerdict, VerifyReport};

/// Default node budget for [`brute_force_decide`].
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 2_000_000;
