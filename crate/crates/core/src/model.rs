//! The multiple-environment MDP data model.
//!
//! A [`Memdp`] is a set of MDPs over one shared state and action space. States
//! and actions are dense indices assigned in declaration order; names are kept
//! for reporting and serialization. Validation completes or rejects missing
//! rows and checks every row is a distribution.
//!
//! Besides the per-environment rows, the model keeps a support index: for each
//! `(state, action)` the list of successors together with the set of
//! environments in which that successor has positive probability. Belief
//! updates and game construction only need this index.

use crate::envset::EnvSet;
use crate::error::ModelError;
use smallvec::SmallVec;
use std::collections::HashMap;

/// Tolerance on row sums.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// A finite probability distribution over states, sorted by state index with
/// strictly positive entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Dist {
    entries: SmallVec<[(usize, f64); 2]>,
}

impl Dist {
    pub fn dirac(state: usize) -> Self {
        Dist {
            entries: smallvec::smallvec![(state, 1.0)],
        }
    }

    /// Merges duplicate states and drops zero entries. The caller is
    /// responsible for the sum; see [`MemdpBuilder::build`].
    pub fn from_entries<I: IntoIterator<Item = (usize, f64)>>(entries: I) -> Self {
        let mut v: SmallVec<[(usize, f64); 2]> = entries.into_iter().collect();
        v.sort_by_key(|e| e.0);
        let mut merged: SmallVec<[(usize, f64); 2]> = SmallVec::new();
        for (s, p) in v {
            match merged.last_mut() {
                Some(last) if last.0 == s => last.1 += p,
                _ => merged.push((s, p)),
            }
        }
        merged.retain(|e| e.1 != 0.0);
        Dist { entries: merged }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn prob(&self, state: usize) -> f64 {
        self.entries
            .binary_search_by_key(&state, |e| e.0)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_dirac(&self, state: usize) -> bool {
        self.entries.len() == 1 && self.entries[0].0 == state
    }
}

/// One successor of a `(state, action)` pair: the successor state and the
/// environments in which it has positive probability.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportEntry {
    pub succ: usize,
    pub envs: EnvSet,
}

/// How validation treats `(state, action)` rows absent from an environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Completion {
    /// Add a Dirac self-loop.
    #[default]
    SelfLoop,
    /// Reject with [`ModelError::MissingRow`].
    Strict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Memdp {
    states: Vec<String>,
    actions: Vec<String>,
    initial: Dist,
    /// `envs[i][s * num_actions + a]`
    envs: Vec<Vec<Dist>>,
    targets: Vec<bool>,
    support: Vec<Vec<SupportEntry>>,
}

impl Memdp {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn num_envs(&self) -> usize {
        self.envs.len()
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn action_name(&self, a: usize) -> &str {
        &self.actions[a]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn action_names(&self) -> &[String] {
        &self.actions
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|n| n == name)
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|n| n == name)
    }

    pub fn initial(&self) -> &Dist {
        &self.initial
    }

    pub fn initial_states(&self) -> impl Iterator<Item = usize> + '_ {
        self.initial.support()
    }

    pub fn is_target(&self, s: usize) -> bool {
        self.targets[s]
    }

    pub fn target_mask(&self) -> &[bool] {
        &self.targets
    }

    pub fn targets(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets
            .iter()
            .enumerate()
            .filter_map(|(s, &t)| t.then_some(s))
    }

    pub fn transition(&self, env: usize, s: usize, a: usize) -> &Dist {
        &self.envs[env][s * self.actions.len() + a]
    }

    /// Successors of `(s, a)` across all environments.
    pub fn support(&self, s: usize, a: usize) -> &[SupportEntry] {
        &self.support[s * self.actions.len() + a]
    }

    pub fn all_envs(&self) -> EnvSet {
        EnvSet::full(self.num_envs())
    }

    pub fn empty_envs(&self) -> EnvSet {
        EnvSet::empty(self.num_envs())
    }

    /// True iff every action at `s` is a Dirac self-loop in environment `env`.
    pub fn is_absorbing(&self, env: usize, s: usize) -> bool {
        (0..self.num_actions()).all(|a| self.transition(env, s, a).is_dirac(s))
    }

    /// The environments of `belief` in which `s --a--> succ` has positive
    /// probability. Empty when no environment of `belief` has the transition.
    pub fn belief_update(&self, belief: &EnvSet, s: usize, a: usize, succ: usize) -> EnvSet {
        match self.support(s, a).iter().find(|e| e.succ == succ) {
            Some(entry) => belief.intersection(&entry.envs),
            None => EnvSet::empty(self.num_envs()),
        }
    }

    /// The model with only the environments of `keep`, renumbered densely.
    /// Also returns, for each new index, the original environment index.
    pub fn restrict_envs(&self, keep: &EnvSet) -> Result<(Memdp, Vec<usize>), ModelError> {
        if keep.is_empty() {
            return Err(ModelError::EmptyRestriction);
        }
        let mapping: Vec<usize> = keep.iter().collect();
        if let Some(&bad) = mapping.iter().find(|&&i| i >= self.num_envs()) {
            return Err(ModelError::EnvOutOfRange {
                index: bad,
                count: self.num_envs(),
            });
        }
        let envs: Vec<Vec<Dist>> = mapping.iter().map(|&i| self.envs[i].clone()).collect();
        let support = build_support_index(&envs, self.num_states(), self.num_actions());
        Ok((
            Memdp {
                states: self.states.clone(),
                actions: self.actions.clone(),
                initial: self.initial.clone(),
                envs,
                targets: self.targets.clone(),
                support,
            },
            mapping,
        ))
    }

    /// Replaces the target set. Used by generators and tests.
    pub fn with_targets(mut self, targets: &[usize]) -> Memdp {
        self.targets = vec![false; self.num_states()];
        for &t in targets {
            self.targets[t] = true;
        }
        self
    }
}

fn build_support_index(
    envs: &[Vec<Dist>],
    num_states: usize,
    num_actions: usize,
) -> Vec<Vec<SupportEntry>> {
    let num_envs = envs.len();
    let mut support = Vec::with_capacity(num_states * num_actions);
    for row in 0..num_states * num_actions {
        let mut entries: Vec<SupportEntry> = Vec::new();
        for (i, env) in envs.iter().enumerate() {
            for succ in env[row].support() {
                match entries.iter_mut().find(|e| e.succ == succ) {
                    Some(e) => e.envs.insert(i),
                    None => entries.push(SupportEntry {
                        succ,
                        envs: EnvSet::singleton(num_envs, i),
                    }),
                }
            }
        }
        entries.sort_by_key(|e| e.succ);
        support.push(entries);
    }
    support
}

/// Index-based construction of a [`Memdp`]. Rows left unset are completed or
/// rejected according to the [`Completion`] mode passed to [`build`](Self::build).
#[derive(Debug, Clone)]
pub struct MemdpBuilder {
    states: Vec<String>,
    actions: Vec<String>,
    initial: Vec<(usize, f64)>,
    targets: Vec<usize>,
    envs: Vec<Vec<Option<Vec<(usize, f64)>>>>,
}

impl MemdpBuilder {
    pub fn new<S: Into<String>, A: Into<String>>(
        states: impl IntoIterator<Item = S>,
        actions: impl IntoIterator<Item = A>,
        num_envs: usize,
    ) -> Self {
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        let actions: Vec<String> = actions.into_iter().map(Into::into).collect();
        let rows = states.len() * actions.len();
        MemdpBuilder {
            states,
            actions,
            initial: Vec::new(),
            targets: Vec::new(),
            envs: vec![vec![None; rows]; num_envs],
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn num_envs(&self) -> usize {
        self.envs.len()
    }

    pub fn initial(&mut self, dist: &[(usize, f64)]) -> &mut Self {
        self.initial = dist.to_vec();
        self
    }

    pub fn target(&mut self, s: usize) -> &mut Self {
        self.targets.push(s);
        self
    }

    pub fn set(&mut self, env: usize, s: usize, a: usize, dist: &[(usize, f64)]) -> &mut Self {
        let row = s * self.actions.len() + a;
        self.envs[env][row] = Some(dist.to_vec());
        self
    }

    /// Sets the same row in every environment.
    pub fn set_all(&mut self, s: usize, a: usize, dist: &[(usize, f64)]) -> &mut Self {
        for env in 0..self.envs.len() {
            self.set(env, s, a, dist);
        }
        self
    }

    pub fn is_set(&self, env: usize, s: usize, a: usize) -> bool {
        self.envs[env][s * self.actions.len() + a].is_some()
    }

    pub fn build(self, completion: Completion) -> Result<Memdp, ModelError> {
        if self.states.is_empty() {
            return Err(ModelError::NoStates);
        }
        if self.actions.is_empty() {
            return Err(ModelError::NoActions);
        }
        if self.envs.is_empty() {
            return Err(ModelError::EmptyEnvironmentList);
        }
        check_unique("state", &self.states)?;
        check_unique("action", &self.actions)?;
        let n = self.states.len();
        let na = self.actions.len();
        let check_prob = |context: &dyn Fn() -> String, s: usize, p: f64| {
            if s >= n {
                return Err(ModelError::UnknownStateRef(format!("#{s}")));
            }
            if !p.is_finite() || !(0.0..=1.0 + PROB_TOLERANCE).contains(&p) {
                return Err(ModelError::InvalidProbability {
                    context: context(),
                    value: p,
                });
            }
            Ok(())
        };

        for &(s, p) in &self.initial {
            check_prob(&|| "initial distribution".to_string(), s, p)?;
        }
        let initial = Dist::from_entries(self.initial.iter().copied());
        if (initial.sum() - 1.0).abs() > PROB_TOLERANCE {
            return Err(ModelError::NonStochasticInitial(initial.sum()));
        }

        let mut targets = vec![false; n];
        for &t in &self.targets {
            if t >= n {
                return Err(ModelError::UnknownStateRef(format!("#{t}")));
            }
            targets[t] = true;
        }

        let mut envs = Vec::with_capacity(self.envs.len());
        for (i, rows) in self.envs.into_iter().enumerate() {
            let mut out = Vec::with_capacity(n * na);
            for (row, dist) in rows.into_iter().enumerate() {
                let (s, a) = (row / na, row % na);
                let dist = match dist {
                    Some(entries) => {
                        let ctx = || {
                            format!(
                                "environment {i}, row ({}, {})",
                                self.states[s], self.actions[a]
                            )
                        };
                        for &(succ, p) in &entries {
                            check_prob(&ctx, succ, p)?;
                        }
                        let d = Dist::from_entries(entries);
                        if (d.sum() - 1.0).abs() > PROB_TOLERANCE {
                            return Err(ModelError::NonStochasticRow {
                                env: i,
                                state: self.states[s].clone(),
                                action: self.actions[a].clone(),
                                sum: d.sum(),
                            });
                        }
                        d
                    }
                    None => match completion {
                        Completion::SelfLoop => Dist::dirac(s),
                        Completion::Strict => {
                            return Err(ModelError::MissingRow {
                                env: i,
                                state: self.states[s].clone(),
                                action: self.actions[a].clone(),
                            })
                        }
                    },
                };
                out.push(dist);
            }
            envs.push(out);
        }
        let support = build_support_index(&envs, n, na);
        Ok(Memdp {
            states: self.states,
            actions: self.actions,
            initial,
            envs,
            targets,
            support,
        })
    }
}

fn check_unique(kind: &'static str, names: &[String]) -> Result<(), ModelError> {
    let mut seen = HashMap::with_capacity(names.len());
    for name in names {
        if seen.insert(name.as_str(), ()).is_some() {
            return Err(ModelError::DuplicateName {
                kind,
                name: name.clone(),
            });
        }
    }
    Ok(())
}

/// An observation `⟨s, J⟩`: a model state together with a belief support.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Observation {
    pub state: usize,
    pub belief: EnvSet,
}

impl Observation {
    pub fn new(state: usize, belief: EnvSet) -> Self {
        Observation { state, belief }
    }
}
