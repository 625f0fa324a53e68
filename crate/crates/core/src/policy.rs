//! Finite-state controllers whose memory is the tracked belief support.

use crate::model::{Memdp, Observation};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// A randomized controller. Each memory node is an observation `⟨s, J⟩`; the
/// node fixes the current state, so the action function only depends on the
/// node. Nodes at target states carry no updates.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefFsc {
    pub nodes: Vec<Observation>,
    /// `(initial state, node)` pairs.
    pub initial: Vec<(usize, usize)>,
    /// Action distribution per node, sorted by action.
    pub actions: Vec<Vec<(usize, f64)>>,
    /// Memory update per node: `(action, next state) -> node`.
    pub updates: Vec<BTreeMap<(usize, usize), usize>>,
}

impl BeliefFsc {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_of(&self, obs: &Observation) -> Option<usize> {
        self.nodes.iter().position(|n| n == obs)
    }

    pub fn initial_node(&self, state: usize) -> Option<usize> {
        self.initial
            .iter()
            .find(|(s, _)| *s == state)
            .map(|&(_, n)| n)
    }

    /// Distinct memory nodes located at `state`.
    pub fn memory_states_at(&self, state: usize) -> usize {
        self.nodes.iter().filter(|n| n.state == state).count()
    }

    /// Actions played with positive probability at `node`.
    pub fn support(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.actions[node]
            .iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|&(a, _)| a)
    }

    /// Controller for the reachable part of `region`, playing uniformly over
    /// `allowed(observation)` everywhere outside the targets. Returns the first
    /// reachable observation for which `allowed` is empty as the error.
    pub(crate) fn from_allowed<F>(m: &Memdp, mut allowed: F) -> Result<BeliefFsc, Observation>
    where
        F: FnMut(&Observation) -> Vec<usize>,
    {
        let mut fsc = BeliefFsc {
            nodes: Vec::new(),
            initial: Vec::new(),
            actions: Vec::new(),
            updates: Vec::new(),
        };
        let mut index: HashMap<Observation, usize> = HashMap::new();
        let mut intern = |obs: Observation, fsc: &mut BeliefFsc| -> usize {
            *index.entry(obs.clone()).or_insert_with(|| {
                fsc.nodes.push(obs);
                fsc.actions.push(Vec::new());
                fsc.updates.push(BTreeMap::new());
                fsc.nodes.len() - 1
            })
        };
        let init_states: BTreeSet<usize> = m.initial_states().collect();
        for s in init_states {
            let n = intern(Observation::new(s, m.all_envs()), &mut fsc);
            fsc.initial.push((s, n));
        }
        let mut next = 0;
        while next < fsc.nodes.len() {
            let obs = fsc.nodes[next].clone();
            if m.is_target(obs.state) {
                let p = 1.0 / m.num_actions() as f64;
                fsc.actions[next] = (0..m.num_actions()).map(|a| (a, p)).collect();
            } else {
                let acts = allowed(&obs);
                if acts.is_empty() {
                    return Err(obs);
                }
                let p = 1.0 / acts.len() as f64;
                fsc.actions[next] = acts.iter().map(|&a| (a, p)).collect();
                for &a in &acts {
                    for e in m.support(obs.state, a) {
                        let up = obs.belief.intersection(&e.envs);
                        if up.is_empty() {
                            continue;
                        }
                        let succ = intern(Observation::new(e.succ, up), &mut fsc);
                        fsc.updates[next].insert((a, e.succ), succ);
                    }
                }
            }
            next += 1;
        }
        Ok(fsc)
    }
}
