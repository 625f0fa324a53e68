//! Antichain-compressed sets of observations.
//!
//! A winning region is downward closed in the belief (a policy winning for
//! `J` wins for every nonempty `J' ⊆ J`), a losing region upward closed. The
//! store keeps only the extremal sets per state.

use crate::envset::EnvSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Closure {
    /// Keeps maximal sets; `contains(s, J)` iff `J ⊆ J'` for a stored `J'`.
    Downward,
    /// Keeps minimal sets; `contains(s, J)` iff `J' ⊆ J` for a stored `J'`.
    Upward,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionStore {
    closure: Closure,
    per_state: Vec<Vec<EnvSet>>,
}

impl RegionStore {
    pub fn winning(num_states: usize) -> Self {
        RegionStore {
            closure: Closure::Downward,
            per_state: vec![Vec::new(); num_states],
        }
    }

    pub fn losing(num_states: usize) -> Self {
        RegionStore {
            closure: Closure::Upward,
            per_state: vec![Vec::new(); num_states],
        }
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    #[inline]
    fn covers(&self, stored: &EnvSet, query: &EnvSet) -> bool {
        match self.closure {
            Closure::Downward => query.is_subset(stored),
            Closure::Upward => stored.is_subset(query),
        }
    }

    pub fn contains(&self, s: usize, belief: &EnvSet) -> bool {
        self.per_state[s].iter().any(|j| self.covers(j, belief))
    }

    /// Adds `belief` and drops the elements it dominates. Returns whether the
    /// represented region grew.
    pub fn insert(&mut self, s: usize, belief: EnvSet) -> bool {
        if self.contains(s, &belief) {
            return false;
        }
        let closure = self.closure;
        self.per_state[s].retain(|j| match closure {
            Closure::Downward => !j.is_subset(&belief),
            Closure::Upward => !belief.is_subset(j),
        });
        self.per_state[s].push(belief);
        true
    }

    /// The antichain stored for `s`.
    pub fn antichain(&self, s: usize) -> &[EnvSet] {
        &self.per_state[s]
    }

    pub fn num_states(&self) -> usize {
        self.per_state.len()
    }

    /// Total number of stored sets.
    pub fn size(&self) -> usize {
        self.per_state.iter().map(Vec::len).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &EnvSet)> + '_ {
        self.per_state
            .iter()
            .enumerate()
            .flat_map(|(s, v)| v.iter().map(move |j| (s, j)))
    }
}
