//! A family whose winning policies need exponentially many memory states.
//!
//! A chain `s0 → {a1, b1} → s1 → … → sn` reveals one bit per stage: at `s_j`
//! environment `2j+1` always moves to `a_{j+1}` and environment `2j+2` always
//! to `b_{j+1}`, all others split evenly. After the chain, stages `g_1 … g_n`
//! let the policy guess the environment; only the correct guess reaches `W`.
//! Each of the `2^n` chain paths leaves a different set of `n` candidates.

use crate::error::GenError;
use crate::model::{Completion, Memdp, MemdpBuilder};

/// The satisfiable member: `n` guess stages for the `n` remaining candidates.
pub fn gen_exponential(n: usize) -> Result<Memdp, GenError> {
    build(n, n)
}

/// One guess stage fewer than needed.
pub fn gen_exponential_unsat(n: usize) -> Result<Memdp, GenError> {
    build(n, n - n.min(1))
}

fn build(n: usize, stages: usize) -> Result<Memdp, GenError> {
    if n == 0 {
        return Err(GenError::ParameterOutOfRange("n must be at least 1".into()));
    }
    if 2 * n > 256 {
        return Err(GenError::ParameterOutOfRange(format!("n = {n} is too large")));
    }
    let envs = 2 * n;
    // s0..sn, a1..an, b1..bn, g1..g_{stages+1}, W
    let s = |j: usize| j;
    let a_state = |j: usize| n + j;
    let b_state = |j: usize| 2 * n + j;
    let g = |j: usize| 3 * n + j;
    let sink = g(stages + 1);
    let win = sink + 1;
    let mut states: Vec<String> = (0..=n).map(|j| format!("s{j}")).collect();
    states.extend((1..=n).map(|j| format!("a{j}")));
    states.extend((1..=n).map(|j| format!("b{j}")));
    states.extend((1..=stages + 1).map(|j| format!("g{j}")));
    states.push("W".into());
    let mut actions = vec!["mix".to_string()];
    actions.extend((1..=envs).map(|k| format!("guess{k}")));
    let num_states = states.len();
    let num_actions = actions.len();
    let mut b = MemdpBuilder::new(states, actions, envs);
    b.initial(&[(s(0), 1.0)]).target(win);
    let mix = 0;
    for i in 0..envs {
        let one_based = i + 1;
        for j in 0..n {
            let row: Vec<(usize, f64)> = if one_based == 2 * j + 1 {
                vec![(a_state(j + 1), 1.0)]
            } else if one_based == 2 * j + 2 {
                vec![(b_state(j + 1), 1.0)]
            } else {
                vec![(a_state(j + 1), 0.5), (b_state(j + 1), 0.5)]
            };
            b.set(i, s(j), mix, &row);
        }
        for j in 1..=n {
            b.set(i, a_state(j), mix, &[(s(j), 1.0)]);
            b.set(i, b_state(j), mix, &[(s(j), 1.0)]);
        }
        b.set(i, s(n), mix, &[(g(1), 1.0)]);
        for j in 1..=stages {
            for k in 1..=envs {
                let to = if k == one_based { win } else { g(j + 1) };
                b.set(i, g(j), k, &[(to, 1.0)]);
            }
        }
        // Every other move falls into the sink.
        for st in 0..num_states {
            if st == sink || st == win {
                continue;
            }
            for act in 0..num_actions {
                if !b.is_set(i, st, act) {
                    b.set(i, st, act, &[(sink, 1.0)]);
                }
            }
        }
    }
    Ok(b.build(Completion::SelfLoop)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::is_acyclic;
    use crate::reference::brute_force_decide;

    #[test]
    fn sizes() {
        let m = gen_exponential(4).unwrap();
        assert_eq!((m.num_envs(), m.num_states(), m.num_actions()), (8, 19, 9));
        let m = gen_exponential(1).unwrap();
        assert_eq!((m.num_envs(), m.num_states()), (2, 7));
        let u = gen_exponential_unsat(4).unwrap();
        assert_eq!(u.num_states(), 18);
        assert!(gen_exponential(0).is_err());
    }

    #[test]
    fn verdicts_for_two() {
        let m = gen_exponential(2).unwrap();
        assert!(is_acyclic(&m));
        assert!(brute_force_decide(&m, 1_000_000).unwrap());
        assert!(!brute_force_decide(&gen_exponential_unsat(2).unwrap(), 1_000_000).unwrap());
    }
}
