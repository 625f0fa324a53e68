use crate::model::{Completion, Memdp, MemdpBuilder};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Parameters of [`gen_random`]. Sizes are upper bounds; the actual sizes are
/// drawn from the seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomParams {
    pub seed: u64,
    pub max_states: usize,
    pub max_envs: usize,
    pub max_actions: usize,
    pub acyclic: bool,
}

impl RandomParams {
    pub fn new(seed: u64, max_states: usize, max_envs: usize, max_actions: usize, acyclic: bool) -> Self {
        RandomParams {
            seed,
            max_states,
            max_envs,
            max_actions,
            acyclic,
        }
    }
}

/// A reproducible random model. Each `(state, action)` row has a base support
/// of one or two successors which each environment perturbs with some
/// probability. The last state is a target. With `acyclic`, transitions only
/// lead to higher-numbered states and states without such successors are
/// absorbing.
pub fn gen_random(p: &RandomParams) -> Memdp {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let n = rng.gen_range(2..=p.max_states.max(2));
    let envs = rng.gen_range(1..=p.max_envs.max(1));
    let actions = rng.gen_range(1..=p.max_actions.max(1));
    let mut b = MemdpBuilder::new(
        super::names(n, |s| format!("s{s}")),
        super::names(actions, |a| format!("a{a}")),
        envs,
    );
    if n > 2 && rng.gen_bool(0.2) {
        b.initial(&[(0, 0.5), (1, 0.5)]);
    } else {
        b.initial(&[(0, 1.0)]);
    }
    let target = n - 1;
    b.target(target);
    // An optional absorbing trap besides the target.
    let trap = (n > 2 && rng.gen_bool(0.5)).then_some(n - 2);

    for s in 0..n {
        if Some(s) == trap || (p.acyclic && s == target) {
            continue;
        }
        let candidates: Vec<usize> = if p.acyclic {
            (s + 1..n).collect()
        } else {
            (0..n).collect()
        };
        if candidates.is_empty() {
            continue;
        }
        for a in 0..actions {
            let base = pick_support(&mut rng, &candidates);
            for env in 0..envs {
                let mut support = base.clone();
                if envs > 1 && rng.gen_bool(0.35) {
                    match rng.gen_range(0..3) {
                        0 if support.len() > 1 => {
                            support.remove(rng.gen_range(0..support.len()));
                        }
                        1 => {
                            let extra = *candidates.choose(&mut rng).unwrap();
                            if !support.contains(&extra) {
                                support.push(extra);
                            }
                        }
                        _ => support = pick_support(&mut rng, &candidates),
                    }
                }
                let prob = 1.0 / support.len() as f64;
                let row: Vec<(usize, f64)> = support.iter().map(|&t| (t, prob)).collect();
                b.set(env, s, a, &row);
            }
        }
    }
    b.build(Completion::SelfLoop)
        .expect("random rows are distributions")
}

fn pick_support(rng: &mut ChaCha8Rng, candidates: &[usize]) -> Vec<usize> {
    let k = if candidates.len() > 1 && rng.gen_bool(0.4) { 2 } else { 1 };
    candidates.choose_multiple(rng, k).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::is_acyclic;

    #[test]
    fn same_seed_same_model() {
        let p = RandomParams::new(7, 6, 3, 3, false);
        assert_eq!(gen_random(&p), gen_random(&p));
        assert_ne!(gen_random(&p), gen_random(&RandomParams { seed: 8, ..p }));
    }

    #[test]
    fn acyclic_flag_holds() {
        for seed in 0..100 {
            let m = gen_random(&RandomParams::new(seed, 8, 4, 3, true));
            assert!(is_acyclic(&m));
            assert!(m.num_states() <= 8 && m.num_envs() <= 4 && m.num_actions() <= 3);
        }
    }
}
