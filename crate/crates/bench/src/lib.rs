//! Benchmark instances shared by the criterion targets.

use memdp_core::benchgen::{
    gen_catchman, gen_exponential, gen_exponential_unsat, gen_frogger, gen_grid, gen_mastermind, gen_pacman,
    gen_qbf, random_qbf,
};
use memdp_core::Memdp;

/// Named instances, small enough for repeated timing.
pub fn instances() -> Vec<(&'static str, Memdp)> {
    vec![
        ("exponential-4", gen_exponential(4).unwrap()),
        ("exponential-unsat-4", gen_exponential_unsat(4).unwrap()),
        ("grid-5x5", gen_grid(5, 5, true).unwrap()),
        ("frogger-8x5", gen_frogger(8, 5, 1, 8).unwrap()),
        ("mastermind-4-2-5", gen_mastermind(4, 2, 5).unwrap()),
        ("catchman-3x3", gen_catchman(3, 3).unwrap()),
        ("pacman-3x3", gen_pacman(3, 3).unwrap()),
        ("qbf-random-7", gen_qbf(&random_qbf(7, 3, 6, 4)).unwrap()),
    ]
}
