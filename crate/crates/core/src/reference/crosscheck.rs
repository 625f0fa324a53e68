//! Agreement checks between the solver and the reference oracles on random
//! models.

use super::{as_winning_recursive, brute_force_decide, verify_policy};
use crate::benchgen::{gen_random, RandomParams};
use crate::bomdp::{Bomdp, DEFAULT_STATE_CAP};
use crate::bsg::Heuristic;
use crate::model::Memdp;
use crate::solver::{find_policy, BoundMode, SolveOptions, Verdict};
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct CrosscheckConfig {
    pub max_states: usize,
    pub max_envs: usize,
    pub max_actions: usize,
    pub acyclic: bool,
    pub brute_force_cap: usize,
}

impl Default for CrosscheckConfig {
    fn default() -> Self {
        CrosscheckConfig {
            max_states: 6,
            max_envs: 3,
            max_actions: 3,
            acyclic: true,
            brute_force_cap: super::DEFAULT_BRUTE_FORCE_CAP,
        }
    }
}

/// Outcome for one seed; serialized as one JSON line by the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckRecord {
    pub seed: u64,
    pub acyclic: bool,
    pub states: usize,
    pub envs: usize,
    pub actions: usize,
    pub recursive: bool,
    /// `None` when the enumeration hit its cap.
    pub brute_force: Option<bool>,
    pub explicit_bomdp: bool,
    /// Verdict per `heuristic/bounds` configuration.
    pub solver: Vec<(String, Option<bool>)>,
    pub agree: bool,
    pub violations: Vec<String>,
}

/// Runs every oracle and every solver configuration on the model for `seed`.
pub fn crosscheck_seed(seed: u64, cfg: &CrosscheckConfig) -> CrosscheckRecord {
    let m = gen_random(&RandomParams {
        seed,
        max_states: cfg.max_states,
        max_envs: cfg.max_envs,
        max_actions: cfg.max_actions,
        acyclic: cfg.acyclic,
    });
    crosscheck_model(seed, &m, cfg)
}

pub(crate) fn crosscheck_model(seed: u64, m: &Memdp, cfg: &CrosscheckConfig) -> CrosscheckRecord {
    let mut violations = Vec::new();
    let recursive = as_winning_recursive(m);
    let brute_force = brute_force_decide(m, cfg.brute_force_cap).ok();
    let b = Bomdp::build(m, DEFAULT_STATE_CAP).expect("random models are small");
    let win = b.win(&b.target_obs());
    let explicit_bomdp = b.initial().iter().all(|&z| win.contains(b.observation(z)));

    if recursive != explicit_bomdp {
        violations.push(format!("recursive {recursive} != explicit {explicit_bomdp}"));
    }
    match brute_force {
        Some(bf) if bf != explicit_bomdp => {
            violations.push(format!("brute force {bf} != explicit {explicit_bomdp}"))
        }
        None => violations.push("brute force exceeded its cap".into()),
        _ => {}
    }

    let mut solver = Vec::new();
    if m.targets().next().is_some() {
        for h in Heuristic::ALL {
            for bounds in BoundMode::ALL {
                let name = format!("{}/{}", h.name(), bounds.name());
                let opts = SolveOptions {
                    heuristic: h,
                    bounds,
                    bound0: Some(2),
                    ..SolveOptions::default()
                };
                match find_policy(m, &opts) {
                    Ok(out) => {
                        let sat = out.verdict == Verdict::Satisfiable;
                        if sat != explicit_bomdp {
                            violations.push(format!("{name}: solver {sat} != explicit {explicit_bomdp}"));
                        }
                        if let Some(fsc) = &out.policy {
                            match verify_policy(m, fsc) {
                                Ok(r) if r.all_pass() => {}
                                Ok(r) => violations
                                    .push(format!("{name}: policy fails in {:?}", r.failing())),
                                Err(e) => violations.push(format!("{name}: {e}")),
                            }
                        }
                        solver.push((name, Some(sat)));
                    }
                    Err(e) => {
                        violations.push(format!("{name}: {e}"));
                        solver.push((name, None));
                    }
                }
            }
        }
    } else if explicit_bomdp {
        violations.push("no targets but explicit BOMDP winning".into());
    }

    CrosscheckRecord {
        seed,
        acyclic: crate::mdp::is_acyclic(m),
        states: m.num_states(),
        envs: m.num_envs(),
        actions: m.num_actions(),
        recursive,
        brute_force,
        explicit_bomdp,
        solver,
        agree: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_agrees() {
        for acyclic in [true, false] {
            let cfg = CrosscheckConfig {
                acyclic,
                ..CrosscheckConfig::default()
            };
            for seed in 0..15 {
                let r = crosscheck_seed(seed, &cfg);
                assert!(r.agree, "{r:?}");
                assert_eq!(r.solver.len(), 12);
            }
        }
    }
}
