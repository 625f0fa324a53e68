//! Exhaustive search over observation-based memoryless policies.
//!
//! Such policies suffice in belief-observation MDPs, and for almost-sure
//! objectives only the support of the randomization matters, so a policy is a
//! nonempty action subset per observation played uniformly. Observations are
//! assigned lazily as they become reachable; a partial assignment is pruned as
//! soon as some environment has a reachable assigned observation from which
//! neither a target nor an unassigned observation is reachable. Observations
//! whose state already loses in one environment of the belief are never
//! entered.

use crate::envset::EnvSet;
use crate::error::SizeCapExceeded;
use crate::mdp::as_win_mdp;
use crate::model::{Memdp, Observation};
use std::collections::HashMap;

/// True iff some observation-based policy reaches the targets almost surely in
/// every environment. Gives up after visiting `cap` search nodes.
pub fn brute_force_decide(m: &Memdp, cap: usize) -> Result<bool, SizeCapExceeded> {
    assert!(m.num_actions() < 32, "action subsets are u32 masks");
    let env_win = (0..m.num_envs())
        .map(|j| as_win_mdp(m, j, m.target_mask()))
        .collect();
    let mut search = Search {
        m,
        env_win,
        obs: Vec::new(),
        index: HashMap::new(),
        succ: Vec::new(),
        dead: Vec::new(),
        mask: Vec::new(),
        visited: 0,
        cap,
    };
    let roots: Vec<usize> = m
        .initial_states()
        .map(|s| search.intern(Observation::new(s, m.all_envs())))
        .collect();
    search.run(&roots)
}

struct Search<'a> {
    m: &'a Memdp,
    /// Almost-sure winning states of each environment on its own.
    env_win: Vec<Vec<bool>>,
    obs: Vec<Observation>,
    index: HashMap<Observation, usize>,
    /// `succ[z][a]`: successor observations with the environments producing them.
    succ: Vec<Vec<Vec<(usize, EnvSet)>>>,
    /// Non-target state losing in some environment of the belief.
    dead: Vec<bool>,
    /// Assigned action subset, zero when unassigned.
    mask: Vec<u32>,
    visited: usize,
    cap: usize,
}

impl Search<'_> {
    fn intern(&mut self, o: Observation) -> usize {
        if let Some(&z) = self.index.get(&o) {
            return z;
        }
        let m = self.m;
        let z = self.obs.len();
        let dead = !m.is_target(o.state) && o.belief.iter().any(|j| !self.env_win[j][o.state]);
        self.index.insert(o.clone(), z);
        self.obs.push(o);
        self.succ.push(Vec::new());
        self.dead.push(dead);
        self.mask.push(0);
        z
    }

    fn successors(&mut self, z: usize) {
        if !self.succ[z].is_empty() {
            return;
        }
        let m = self.m;
        let o = self.obs[z].clone();
        let mut rows = Vec::with_capacity(m.num_actions());
        for a in 0..m.num_actions() {
            let mut row = Vec::new();
            for e in m.support(o.state, a) {
                let up = o.belief.intersection(&e.envs);
                if !up.is_empty() {
                    let t = self.intern(Observation::new(e.succ, up.clone()));
                    row.push((t, up));
                }
            }
            rows.push(row);
        }
        self.succ[z] = rows;
    }

    fn is_open(&self, z: usize) -> bool {
        !self.m.is_target(self.obs[z].state) && self.mask[z] == 0
    }

    /// Successors of `z` in environment `env` under its assigned subset.
    fn env_succs(&self, z: usize, env: usize) -> impl Iterator<Item = usize> + '_ {
        let mask = self.mask[z];
        self.succ[z]
            .iter()
            .enumerate()
            .filter(move |(a, _)| mask >> a & 1 == 1)
            .flat_map(move |(_, row)| {
                row.iter()
                    .filter(move |(_, envs)| envs.contains(env))
                    .map(|&(t, _)| t)
            })
    }

    /// `None` if the partial assignment is refuted, otherwise the open
    /// observations reachable under it.
    fn check(&self, roots: &[usize]) -> Option<Vec<usize>> {
        let n = self.obs.len();
        let mut open: Vec<usize> = Vec::new();
        let mut open_seen = vec![false; n];
        for env in 0..self.m.num_envs() {
            let mut reach = vec![false; n];
            let mut order: Vec<usize> = Vec::new();
            for &r in roots {
                if !reach[r] {
                    reach[r] = true;
                    order.push(r);
                }
            }
            let mut k = 0;
            while k < order.len() {
                let z = order[k];
                k += 1;
                if self.dead[z] {
                    return None;
                }
                if self.m.is_target(self.obs[z].state) {
                    continue;
                }
                if self.mask[z] == 0 {
                    if !open_seen[z] {
                        open_seen[z] = true;
                        open.push(z);
                    }
                    continue;
                }
                for t in self.env_succs(z, env) {
                    if !reach[t] {
                        reach[t] = true;
                        order.push(t);
                    }
                }
            }
            // Every reachable node must reach a target or an open observation.
            let mut good = vec![false; n];
            for &z in &order {
                good[z] = self.m.is_target(self.obs[z].state) || self.mask[z] == 0;
            }
            loop {
                let mut changed = false;
                for &z in &order {
                    if !good[z] && self.env_succs(z, env).any(|t| good[t]) {
                        good[z] = true;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            if order.iter().any(|&z| !good[z]) {
                return None;
            }
        }
        Some(open)
    }

    fn run(&mut self, roots: &[usize]) -> Result<bool, SizeCapExceeded> {
        self.visited += 1;
        if self.visited > self.cap {
            return Err(SizeCapExceeded {
                what: "policy enumeration",
                cap: self.cap,
            });
        }
        let Some(open) = self.check(roots) else {
            return Ok(false);
        };
        // Most recently discovered first keeps the search local.
        let Some(&z) = open.iter().max() else {
            return Ok(true);
        };
        debug_assert!(self.is_open(z));
        self.successors(z);
        let viable = self.succ[z]
            .iter()
            .enumerate()
            .filter(|(_, row)| row.iter().all(|&(t, _)| !self.dead[t]))
            .fold(0u32, |acc, (a, _)| acc | 1 << a);
        // Nonempty submasks of `viable`, largest first.
        let mut mask = viable;
        while mask != 0 {
            self.mask[z] = mask;
            if self.run(roots)? {
                return Ok(true);
            }
            mask = (mask - 1) & viable;
        }
        self.mask[z] = 0;
        Ok(false)
    }
}
