//! Explicit belief-observation MDPs.
//!
//! A BOMDP state is `⟨s, j, J⟩`: model state, true environment and belief
//! support, observed as `⟨s, J⟩`. Every observation reachable from the initial
//! distribution (or from the uniform start of a local BOMDP) contains all of
//! its member states `⟨s, j, J⟩` for `j ∈ J`, so the representation is per
//! observation: for each `(observation, action)` the successor observations
//! together with the environments of `J` that produce them.

use crate::envgraph::one_based;
use crate::envset::EnvSet;
use crate::error::{ModelError, SizeCapExceeded};
use crate::model::{Memdp, Observation};
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write;

/// Default cap on the number of explicit BOMDP states `⟨s, j, J⟩`.
pub const DEFAULT_STATE_CAP: usize = 5_000_000;

pub type ObsSet = BTreeSet<Observation>;

/// Successor observation of an `(observation, action)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ObsEdge {
    pub succ: usize,
    /// Environments `j ∈ J` whose transition has this successor.
    pub envs: EnvSet,
}

#[derive(Debug, Clone)]
pub struct Bomdp {
    num_actions: usize,
    observations: Vec<Observation>,
    index: HashMap<Observation, usize>,
    target: Vec<bool>,
    frontier: Vec<bool>,
    initial: Vec<usize>,
    /// `edges[z * num_actions + a]`
    edges: Vec<Vec<ObsEdge>>,
}

impl Bomdp {
    /// The BOMDP reachable from `⟨s, I⟩` for the initial states `s`.
    pub fn build(m: &Memdp, cap: usize) -> Result<Bomdp, SizeCapExceeded> {
        let roots: Vec<Observation> = m
            .initial_states()
            .map(|s| Observation::new(s, m.all_envs()))
            .collect();
        Builder::new(m, cap).run(roots, None)
    }

    /// The local BOMDP for `belief`: all `⟨s, J⟩` are initial, and every
    /// observation with another belief is an absorbing frontier observation.
    /// Environment indices are those of `m`.
    pub fn local(m: &Memdp, belief: &EnvSet, cap: usize) -> Result<Bomdp, LocalError> {
        if belief.is_empty() {
            return Err(LocalError::Model(ModelError::EmptyRestriction));
        }
        if let Some(bad) = belief.iter().find(|&i| i >= m.num_envs()) {
            return Err(LocalError::Model(ModelError::EnvOutOfRange {
                index: bad,
                count: m.num_envs(),
            }));
        }
        let roots: Vec<Observation> = (0..m.num_states())
            .map(|s| Observation::new(s, belief.clone()))
            .collect();
        Ok(Builder::new(m, cap).run(roots, Some(belief))?)
    }

    /// Copy in which the observations of `frontier` are absorbing.
    pub fn slice(&self, frontier: &ObsSet) -> Bomdp {
        let mut out = self.clone();
        for obs in frontier {
            if let Some(&z) = self.index.get(obs) {
                out.make_absorbing(z);
            }
        }
        out
    }

    fn make_absorbing(&mut self, z: usize) {
        self.frontier[z] = true;
        let belief = self.observations[z].belief.clone();
        for a in 0..self.num_actions {
            self.edges[z * self.num_actions + a] = vec![ObsEdge {
                succ: z,
                envs: belief.clone(),
            }];
        }
    }

    pub fn num_observations(&self) -> usize {
        self.observations.len()
    }

    /// Number of explicit states `⟨s, j, J⟩`.
    pub fn num_states(&self) -> usize {
        self.observations.iter().map(|o| o.belief.len()).sum()
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn observation(&self, z: usize) -> &Observation {
        &self.observations[z]
    }

    pub fn obs_index(&self, obs: &Observation) -> Option<usize> {
        self.index.get(obs).copied()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_frontier(&self, z: usize) -> bool {
        self.frontier[z]
    }

    pub fn is_target(&self, z: usize) -> bool {
        self.target[z]
    }

    pub fn edges(&self, z: usize, a: usize) -> &[ObsEdge] {
        &self.edges[z * self.num_actions + a]
    }

    /// Observations whose state is a target.
    pub fn target_obs(&self) -> ObsSet {
        (0..self.observations.len())
            .filter(|&z| self.target[z])
            .map(|z| self.observations[z].clone())
            .collect()
    }

    pub fn frontier_obs(&self) -> ObsSet {
        (0..self.observations.len())
            .filter(|&z| self.frontier[z])
            .map(|z| self.observations[z].clone())
            .collect()
    }

    /// Observations from which an observation-based policy reaches `goal` with
    /// probability one from every member state.
    pub fn win(&self, goal: &ObsSet) -> ObsSet {
        let mask: Vec<bool> = self
            .observations
            .iter()
            .map(|o| goal.contains(o))
            .collect();
        let win = self.win_mask(&mask);
        (0..self.observations.len())
            .filter(|&z| win[z])
            .map(|z| self.observations[z].clone())
            .collect()
    }

    /// [`win`](Self::win) over observation indices.
    pub fn win_mask(&self, goal: &[bool]) -> Vec<bool> {
        let nz = self.observations.len();
        let na = self.num_actions;
        // Member state (z, j) has id offset[z] + rank of j in J.
        let mut offset = Vec::with_capacity(nz + 1);
        let mut members: Vec<Vec<usize>> = Vec::with_capacity(nz);
        let mut total = 0;
        for obs in &self.observations {
            offset.push(total);
            let v = obs.belief.to_vec();
            total += v.len();
            members.push(v);
        }
        offset.push(total);
        let state_id = |z: usize, j: usize| offset[z] + members[z].binary_search(&j).unwrap();

        // Predecessors of each member state: (observation, action).
        let mut pred_count = vec![0usize; total + 1];
        for z in 0..nz {
            for a in 0..na {
                for e in self.edges(z, a) {
                    for j in &e.envs {
                        pred_count[state_id(e.succ, j)] += 1;
                    }
                }
            }
        }
        let mut pred_start = vec![0usize; total + 1];
        for k in 0..total {
            pred_start[k + 1] = pred_start[k] + pred_count[k];
        }
        let mut fill = pred_start.clone();
        let mut preds = vec![(0u32, 0u32); pred_start[total]];
        for z in 0..nz {
            for a in 0..na {
                for e in self.edges(z, a) {
                    for j in &e.envs {
                        let t = state_id(e.succ, j);
                        preds[fill[t]] = (z as u32, a as u32);
                        fill[t] += 1;
                    }
                }
            }
        }

        let mut candidate = vec![true; nz];
        let mut allowed = vec![false; nz * na];
        loop {
            for z in 0..nz {
                for a in 0..na {
                    allowed[z * na + a] =
                        candidate[z] && self.edges(z, a).iter().all(|e| candidate[e.succ]);
                }
            }
            let mut reached = vec![false; total];
            let mut queue: VecDeque<usize> = VecDeque::new();
            for z in (0..nz).filter(|&z| goal[z]) {
                for k in offset[z]..offset[z + 1] {
                    reached[k] = true;
                    queue.push_back(k);
                }
            }
            while let Some(t) = queue.pop_front() {
                // The predecessor state has the same environment as t.
                let j = {
                    let z = offset.partition_point(|&o| o <= t) - 1;
                    members[z][t - offset[z]]
                };
                for &(z, a) in &preds[pred_start[t]..pred_start[t + 1]] {
                    let (z, a) = (z as usize, a as usize);
                    if allowed[z * na + a] {
                        let k = state_id(z, j);
                        if !reached[k] {
                            reached[k] = true;
                            queue.push_back(k);
                        }
                    }
                }
            }
            let next: Vec<bool> = (0..nz)
                .map(|z| candidate[z] && (offset[z]..offset[z + 1]).all(|k| reached[k]))
                .collect();
            if next == candidate {
                return candidate;
            }
            candidate = next;
        }
    }

    /// Actions at `z` whose successors all lie in `region`.
    pub fn safe_actions(&self, z: usize, region: &[bool]) -> Vec<usize> {
        (0..self.num_actions)
            .filter(|&a| self.edges(z, a).iter().all(|e| region[e.succ]))
            .collect()
    }

    /// DOT digraph over observations with one-based environment labels.
    pub fn to_dot(&self, m: &Memdp) -> String {
        let mut out = String::from("digraph bomdp {\n");
        for (z, obs) in self.observations.iter().enumerate() {
            let shape = if self.target[z] {
                "doublecircle"
            } else if self.frontier[z] {
                "box"
            } else {
                "ellipse"
            };
            let _ = writeln!(
                out,
                "  z{z} [label=\"{}, {}\", shape={shape}];",
                m.state_name(obs.state),
                one_based(&obs.belief)
            );
        }
        for z in 0..self.observations.len() {
            if self.frontier[z] {
                continue;
            }
            for a in 0..self.num_actions {
                for e in self.edges(z, a) {
                    let _ = writeln!(
                        out,
                        "  z{z} -> z{} [label=\"{} {}\"];",
                        e.succ,
                        m.action_name(a),
                        one_based(&e.envs)
                    );
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LocalError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Cap(#[from] SizeCapExceeded),
}

struct Builder<'a> {
    m: &'a Memdp,
    cap: usize,
    observations: Vec<Observation>,
    index: HashMap<Observation, usize>,
    states: usize,
}

impl<'a> Builder<'a> {
    fn new(m: &'a Memdp, cap: usize) -> Self {
        Builder {
            m,
            cap,
            observations: Vec::new(),
            index: HashMap::new(),
            states: 0,
        }
    }

    fn intern(&mut self, obs: Observation) -> Result<usize, SizeCapExceeded> {
        if let Some(&z) = self.index.get(&obs) {
            return Ok(z);
        }
        self.states += obs.belief.len();
        if self.states > self.cap {
            return Err(SizeCapExceeded {
                what: "explicit BOMDP",
                cap: self.cap,
            });
        }
        let z = self.observations.len();
        self.index.insert(obs.clone(), z);
        self.observations.push(obs);
        Ok(z)
    }

    /// Explores from `roots`. With `local`, observations whose belief differs
    /// are frontier and not expanded.
    fn run(
        mut self,
        roots: Vec<Observation>,
        local: Option<&EnvSet>,
    ) -> Result<Bomdp, SizeCapExceeded> {
        let m = self.m;
        let na = m.num_actions();
        let mut initial = Vec::new();
        for r in roots {
            let z = self.intern(r)?;
            if !initial.contains(&z) {
                initial.push(z);
            }
        }
        let mut edges: Vec<Vec<ObsEdge>> = Vec::new();
        let mut frontier = Vec::new();
        let mut next = 0;
        while next < self.observations.len() {
            let obs = self.observations[next].clone();
            let is_frontier = local.is_some_and(|j| *j != obs.belief);
            frontier.push(is_frontier);
            for a in 0..na {
                let row = if is_frontier {
                    vec![ObsEdge {
                        succ: next,
                        envs: obs.belief.clone(),
                    }]
                } else {
                    let mut row = Vec::new();
                    for entry in m.support(obs.state, a) {
                        let up = obs.belief.intersection(&entry.envs);
                        if up.is_empty() {
                            continue;
                        }
                        let succ = self.intern(Observation::new(entry.succ, up.clone()))?;
                        row.push(ObsEdge { succ, envs: up });
                    }
                    debug_assert!(!row.is_empty(), "belief lost every environment");
                    row
                };
                edges.push(row);
            }
            next += 1;
        }
        let target = self
            .observations
            .iter()
            .map(|o| m.is_target(o.state))
            .collect();
        Ok(Bomdp {
            num_actions: na,
            observations: self.observations,
            index: self.index,
            target,
            frontier,
            initial,
            edges,
        })
    }
}
