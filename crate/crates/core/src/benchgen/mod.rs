//! Model generators: the running example, hardness and memory witnesses,
//! benchmark families and random instances.

mod exponential;
mod frogger;
mod grid;
mod mastermind;
mod pacman;
pub mod qbf;
mod random;

pub use exponential::{gen_exponential, gen_exponential_unsat};
pub use frogger::gen_frogger;
pub use grid::gen_grid;
pub use mastermind::gen_mastermind;
pub use pacman::{gen_catchman, gen_pacman};
pub use qbf::{gen_qbf, parse_qdimacs, qbf_eval, random_qbf, QbfFormula, Quantifier};
pub use random::{gen_random, RandomParams};

use crate::model::{Completion, Memdp, MemdpBuilder};

/// Three environments over `s0, s1, good, bad`. The environments differ in how
/// the query actions `q1, q2` move between `s0` and `s1` and in which guess
/// `a1, a2, a3` leads to `good`. Environment 3 never leaves `s0`.
pub fn running_example() -> Memdp {
    let mut b = MemdpBuilder::new(
        ["s0", "s1", "good", "bad"],
        ["q1", "q2", "a1", "a2", "a3"],
        3,
    );
    let (s0, s1, good, bad) = (0, 1, 2, 3);
    let (q1, q2, a1, a2, a3) = (0, 1, 2, 3, 4);
    b.initial(&[(s0, 1.0)]).target(good);
    let guesses = [a1, a2, a3];
    // N1: both queries switch; a1 wins.
    for (s, other) in [(s0, s1), (s1, s0)] {
        b.set(0, s, q1, &[(other, 1.0)]).set(0, s, q2, &[(other, 1.0)]);
    }
    // N2: q1 stays, q2 switches; a2 wins.
    for (s, other) in [(s0, s1), (s1, s0)] {
        b.set(1, s, q1, &[(s, 1.0)]).set(1, s, q2, &[(other, 1.0)]);
    }
    // N3: queries loop at s0; a3 wins. s1 is left to the self-loop completion.
    b.set(2, s0, q1, &[(s0, 1.0)]).set(2, s0, q2, &[(s0, 1.0)]);
    for (env, winning) in [(0, a1), (1, a2)] {
        for s in [s0, s1] {
            for g in guesses {
                let to = if g == winning { good } else { bad };
                b.set(env, s, g, &[(to, 1.0)]);
            }
        }
    }
    for g in guesses {
        let to = if g == a3 { good } else { bad };
        b.set(2, s0, g, &[(to, 1.0)]);
    }
    b.build(Completion::SelfLoop)
        .expect("running example is well formed")
}

/// Five environments with identical supports but different probabilities, so
/// the belief support never shrinks while the probabilistic belief takes
/// infinitely many values. Satisfiable by always playing `a`.
pub fn gen_infinite_belief() -> Memdp {
    let envs = 5;
    let mut b = MemdpBuilder::new(["s0", "s1", "goal", "fail"], ["a", "b"], envs);
    let (s0, s1, goal, fail) = (0, 1, 2, 3);
    b.initial(&[(s0, 1.0)]).target(goal);
    for i in 0..envs {
        let p = (i + 1) as f64 / (envs + 1) as f64;
        b.set(i, s0, 0, &[(s1, p), (s0, 1.0 - p)]);
        b.set(i, s0, 1, &[(fail, 1.0)]);
        b.set(i, s1, 0, &[(goal, 1.0 - p), (s0, p)]);
        b.set(i, s1, 1, &[(s0, 1.0)]);
    }
    b.build(Completion::SelfLoop)
        .expect("infinite-belief model is well formed")
}

/// Builder helper: state names from a closure over indices.
pub(crate) fn names<F: Fn(usize) -> String>(n: usize, f: F) -> Vec<String> {
    (0..n).map(f).collect()
}
