//! Qualitative analysis of the individual environment MDPs.

use crate::model::Memdp;
use std::collections::VecDeque;

/// Forward closure of `from` in environment `env` over positive-probability
/// transitions under any action.
pub fn reachable_states(m: &Memdp, env: usize, from: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; m.num_states()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &s in from {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        for a in 0..m.num_actions() {
            for succ in m.transition(env, s, a).support() {
                if !seen[succ] {
                    seen[succ] = true;
                    queue.push_back(succ);
                }
            }
        }
    }
    seen
}

/// True iff in every environment each state is absorbing or unreachable from
/// its own successors.
pub fn is_acyclic(m: &Memdp) -> bool {
    (0..m.num_envs()).all(|env| env_is_acyclic(m, env))
}

fn env_is_acyclic(m: &Memdp, env: usize) -> bool {
    let n = m.num_states();
    let absorbing: Vec<bool> = (0..n).map(|s| m.is_absorbing(env, s)).collect();
    // Kahn's algorithm on the subgraph of non-absorbing states. Absorbing
    // states only loop on themselves, so no cycle passes through them.
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for s in (0..n).filter(|&s| !absorbing[s]) {
        for a in 0..m.num_actions() {
            for t in m.transition(env, s, a).support() {
                if !absorbing[t] && !succs[s].contains(&t) {
                    succs[s].push(t);
                    indegree[t] += 1;
                }
            }
        }
    }
    let mut queue: Vec<usize> = (0..n)
        .filter(|&s| !absorbing[s] && indegree[s] == 0)
        .collect();
    let mut removed = 0;
    while let Some(s) = queue.pop() {
        removed += 1;
        for &t in &succs[s] {
            indegree[t] -= 1;
            if indegree[t] == 0 {
                queue.push(t);
            }
        }
    }
    removed == absorbing.iter().filter(|&&a| !a).count()
}

/// States of environment `env` from which some policy reaches `targets` with
/// probability one.
///
/// Greatest fixpoint: restrict every state to the actions whose successors stay
/// in the candidate set, keep the states that can still reach a target through
/// such actions, repeat until nothing changes.
pub fn as_win_mdp(m: &Memdp, env: usize, targets: &[bool]) -> Vec<bool> {
    let n = m.num_states();
    let na = m.num_actions();
    // Predecessor lists: (pred state, action) for each successor.
    let mut preds: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for s in 0..n {
        for a in 0..na {
            for t in m.transition(env, s, a).support() {
                preds[t].push((s, a));
            }
        }
    }
    let mut candidate = vec![true; n];
    loop {
        let allowed = |s: usize, a: usize, cand: &[bool]| {
            m.transition(env, s, a).support().all(|t| cand[t])
        };
        let mut reach = vec![false; n];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for s in 0..n {
            if targets[s] {
                reach[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(t) = queue.pop_front() {
            for &(s, a) in &preds[t] {
                if !reach[s] && candidate[s] && allowed(s, a, &candidate) {
                    reach[s] = true;
                    queue.push_back(s);
                }
            }
        }
        if reach == candidate {
            return candidate;
        }
        candidate = reach;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen::{gen_exponential, gen_random, running_example, RandomParams};

    #[test]
    fn reachable_in_running_example() {
        let m = running_example();
        let s0 = m.state_index("s0").unwrap();
        let r = reachable_states(&m, 2, &[s0]);
        let names: Vec<&str> = (0..m.num_states())
            .filter(|&s| r[s])
            .map(|s| m.state_name(s))
            .collect();
        assert_eq!(names, vec!["s0", "good", "bad"]);
        let good = m.state_index("good").unwrap();
        let r = reachable_states(&m, 0, &[good]);
        assert_eq!(r.iter().filter(|&&x| x).count(), 1);
    }

    fn bfs_oracle(m: &Memdp, env: usize, from: &[usize]) -> Vec<bool> {
        // Iterated one-step closure until stable.
        let mut set = vec![false; m.num_states()];
        for &s in from {
            set[s] = true;
        }
        loop {
            let mut next = set.clone();
            for s in 0..m.num_states() {
                if set[s] {
                    for a in 0..m.num_actions() {
                        for (t, p) in m.transition(env, s, a).iter() {
                            if p > 0.0 {
                                next[t] = true;
                            }
                        }
                    }
                }
            }
            if next == set {
                return set;
            }
            set = next;
        }
    }

    #[test]
    fn reachable_matches_fixpoint_oracle() {
        for seed in 0..40 {
            let m = gen_random(&RandomParams::new(seed, 6, 2, 3, seed % 2 == 0));
            for env in 0..m.num_envs() {
                for s in 0..m.num_states() {
                    assert_eq!(reachable_states(&m, env, &[s]), bfs_oracle(&m, env, &[s]));
                }
            }
        }
    }

    #[test]
    fn acyclicity() {
        assert!(!is_acyclic(&running_example()));
        assert!(is_acyclic(&gen_exponential(3).unwrap()));
        let mut b = crate::model::MemdpBuilder::new(["s"], ["a"], 1);
        b.initial(&[(0, 1.0)]).target(0);
        assert!(is_acyclic(&b.build(Default::default()).unwrap()));
        for seed in 0..50 {
            let m = gen_random(&RandomParams::new(seed, 6, 3, 3, true));
            assert!(is_acyclic(&m), "seed {seed}");
        }
    }

    /// Brute force over memoryless deterministic policies: a state wins iff some
    /// policy's induced chain reaches the target with probability one from it.
    fn as_win_oracle(m: &Memdp, env: usize) -> Vec<bool> {
        let n = m.num_states();
        let na = m.num_actions();
        let mut result = vec![false; n];
        let total = na.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let policy: Vec<usize> = (0..n)
                .map(|_| {
                    let a = c % na;
                    c /= na;
                    a
                })
                .collect();
            // can_reach[s]: target reachable in the chain.
            let mut can_reach: Vec<bool> = (0..n).map(|s| m.is_target(s)).collect();
            loop {
                let mut changed = false;
                for s in 0..n {
                    if !can_reach[s]
                        && m.transition(env, s, policy[s]).support().any(|t| can_reach[t])
                    {
                        can_reach[s] = true;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            for s in 0..n {
                if result[s] {
                    continue;
                }
                let mut seen = vec![false; n];
                let mut stack = vec![s];
                seen[s] = true;
                let mut ok = true;
                while let Some(x) = stack.pop() {
                    if m.is_target(x) {
                        continue;
                    }
                    if !can_reach[x] {
                        ok = false;
                        break;
                    }
                    for t in m.transition(env, x, policy[x]).support() {
                        if !seen[t] {
                            seen[t] = true;
                            stack.push(t);
                        }
                    }
                }
                result[s] = ok;
            }
        }
        result
    }

    #[test]
    fn as_win_running_example() {
        let m = running_example();
        let w = as_win_mdp(&m, 0, m.target_mask());
        let s0 = m.state_index("s0").unwrap();
        let s1 = m.state_index("s1").unwrap();
        let bad = m.state_index("bad").unwrap();
        assert!(w[s0] && w[s1]);
        assert!(!w[bad]);
        assert_eq!(w, as_win_oracle(&m, 0));
        for t in m.targets() {
            assert!(w[t]);
        }
    }

    #[test]
    fn as_win_excludes_trapped_state() {
        let mut b = crate::model::MemdpBuilder::new(["s", "sink", "t"], ["a", "b"], 1);
        b.initial(&[(0, 1.0)]).target(2);
        b.set(0, 0, 0, &[(1, 1.0)]).set(0, 0, 1, &[(1, 1.0)]);
        let m = b.build(Default::default()).unwrap();
        let w = as_win_mdp(&m, 0, m.target_mask());
        assert_eq!(w, vec![false, false, true]);
    }

    #[test]
    fn as_win_matches_policy_enumeration() {
        for seed in 0..150 {
            let m = gen_random(&RandomParams::new(seed, 6, 2, 3, seed % 3 == 0));
            for env in 0..m.num_envs() {
                assert_eq!(
                    as_win_mdp(&m, env, m.target_mask()),
                    as_win_oracle(&m, env),
                    "seed {seed} env {env}"
                );
            }
        }
    }
}
