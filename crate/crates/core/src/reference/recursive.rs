//! Recursive search over the environment graph.
//!
//! The winning observations with belief `J` depend only on the winning
//! observations of the strict sub-beliefs reachable from `J`. Each level is
//! solved on the local BOMDP of `J`, with the frontier observations already
//! known to be winning added to the goal.

use crate::bomdp::{Bomdp, ObsSet, DEFAULT_STATE_CAP};
use crate::envset::EnvSet;
use crate::model::{Memdp, Observation};
use std::collections::HashMap;

/// Default number of beliefs whose results are cached.
pub const DEFAULT_MEMO_BUDGET: usize = 4096;

/// Winning observations `⟨s, J⟩` of the full BOMDP for the fixed belief `J`.
pub fn search_recursive(m: &Memdp, belief: &EnvSet) -> ObsSet {
    search_recursive_with_budget(m, belief, DEFAULT_MEMO_BUDGET)
}

/// [`search_recursive`] caching at most `budget` beliefs.
pub fn search_recursive_with_budget(m: &Memdp, belief: &EnvSet, budget: usize) -> ObsSet {
    assert!(!belief.is_empty(), "belief must be nonempty");
    let mut memo = Memo {
        map: HashMap::new(),
        budget,
    };
    let win = winning_states(m, belief, &mut memo);
    (0..m.num_states())
        .filter(|&s| win[s])
        .map(|s| Observation::new(s, belief.clone()))
        .collect()
}

/// True iff every initial observation `⟨s, I⟩` is winning.
pub fn as_winning_recursive(m: &Memdp) -> bool {
    let win = search_recursive(m, &m.all_envs());
    m.initial_states()
        .all(|s| win.contains(&Observation::new(s, m.all_envs())))
}

struct Memo {
    map: HashMap<EnvSet, Vec<bool>>,
    budget: usize,
}

/// `win[s]` iff `⟨s, belief⟩` is winning.
fn winning_states(m: &Memdp, belief: &EnvSet, memo: &mut Memo) -> Vec<bool> {
    if let Some(w) = memo.map.get(belief) {
        return w.clone();
    }
    let b = Bomdp::local(m, belief, DEFAULT_STATE_CAP).expect("local BOMDP within cap");
    let mut goal = vec![false; b.num_observations()];
    for (z, obs) in b.observations().iter().enumerate() {
        goal[z] = m.is_target(obs.state)
            || (b.is_frontier(z) && winning_states(m, &obs.belief, memo)[obs.state]);
    }
    let win = b.win_mask(&goal);
    let mut out = vec![false; m.num_states()];
    for (z, obs) in b.observations().iter().enumerate() {
        if obs.belief == *belief {
            out[obs.state] = win[z];
        }
    }
    if memo.map.len() < memo.budget {
        memo.map.insert(belief.clone(), out.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen::{gen_random, running_example, RandomParams};
    use crate::mdp::as_win_mdp;
    use crate::model::MemdpBuilder;

    #[test]
    fn singleton_is_the_mdp_region() {
        let m = running_example();
        for i in 0..3 {
            let j = EnvSet::singleton(3, i);
            let w = search_recursive(&m, &j);
            let mdp = as_win_mdp(&m, i, m.target_mask());
            for s in 0..m.num_states() {
                assert_eq!(w.contains(&Observation::new(s, j.clone())), mdp[s]);
            }
        }
    }

    #[test]
    fn running_example_wins() {
        let m = running_example();
        let s0 = m.state_index("s0").unwrap();
        assert!(search_recursive(&m, &m.all_envs()).contains(&Observation::new(s0, m.all_envs())));
        assert!(as_winning_recursive(&m));
    }

    #[test]
    fn unreachable_target_in_one_environment() {
        let mut b = MemdpBuilder::new(["s", "t"], ["a"], 2);
        b.initial(&[(0, 1.0)]).target(1);
        b.set(0, 0, 0, &[(1, 1.0)]);
        let m = b.build(Default::default()).unwrap();
        assert!(!as_winning_recursive(&m));
    }

    #[test]
    fn matches_explicit_bomdp() {
        for seed in 0..80 {
            let m = gen_random(&RandomParams::new(seed, 5, 3, 3, seed % 2 == 0));
            let b = Bomdp::build(&m, DEFAULT_STATE_CAP).unwrap();
            let w = b.win(&b.target_obs());
            let all = m.all_envs();
            let rec = search_recursive(&m, &all);
            for obs in b.observations().iter().filter(|o| o.belief == all) {
                assert_eq!(rec.contains(obs), w.contains(obs), "seed {seed} {obs:?}");
            }
            // The budget only changes running time.
            assert_eq!(search_recursive_with_budget(&m, &all, 0), rec);
        }
    }
}
