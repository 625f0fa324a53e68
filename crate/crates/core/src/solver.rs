//! The partial-exploration policy search.
//!
//! Each iteration builds a bounded slice of the belief-support game, cut at
//! the observations already known to be winning or losing, and solves it twice:
//! with the frontier losing (a lower bound on the winning region) and with the
//! frontier winning (an upper bound). Decided observations are stored in
//! antichains and generalize to smaller (winning) or larger (losing) beliefs.

use crate::bomdp::{Bomdp, DEFAULT_STATE_CAP};
use crate::bsg::{generate_game_slice_with, Heuristic, Label, SliceLimits};
use crate::error::{PolicyError, SolveError};
use crate::mdp::{as_win_mdp, is_acyclic};
use crate::model::{Memdp, Observation};
use crate::policy::BeliefFsc;
use crate::region::RegionStore;
use crate::EnvSet;
use rayon::prelude::*;
use serde::Serialize;
use std::str::FromStr;
use std::time::{Duration, Instant};

/// Which bounds each iteration computes. Complete slices compute both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BoundMode {
    /// Winning region only; suited to satisfiable instances.
    Lower,
    /// Losing region only.
    Upper,
    #[default]
    Both,
}

impl BoundMode {
    pub const ALL: [BoundMode; 3] = [BoundMode::Lower, BoundMode::Upper, BoundMode::Both];

    pub fn name(self) -> &'static str {
        match self {
            BoundMode::Lower => "lower",
            BoundMode::Upper => "upper",
            BoundMode::Both => "both",
        }
    }

    fn lower(self) -> bool {
        self != BoundMode::Upper
    }

    fn upper(self) -> bool {
        self != BoundMode::Lower
    }
}

impl FromStr for BoundMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        BoundMode::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown bound mode `{s}`"))
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub heuristic: Heuristic,
    pub bounds: BoundMode,
    /// First slice bound; defaults to `max(1024, |S|·|I|)`.
    pub bound0: Option<usize>,
    /// Factor between consecutive bounds.
    pub growth: usize,
    /// Iterations without progress before an unbounded slice is forced.
    pub stagnation: usize,
    pub timeout: Option<Duration>,
    /// Maximum number of nodes in one game slice.
    pub memcap: Option<usize>,
    /// Cap on the explicit BOMDP built to confirm unsatisfiability on cyclic
    /// models. Zero disables the check.
    pub bomdp_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            heuristic: Heuristic::NegEntropy,
            bounds: BoundMode::Both,
            bound0: None,
            growth: 2,
            stagnation: 3,
            timeout: None,
            memcap: None,
            bomdp_cap: DEFAULT_STATE_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Satisfiable,
    Unsatisfiable,
}

/// How the verdict was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    /// Decided by the game; exact on acyclic models and for satisfiable ones.
    Game,
    /// Game verdict unsatisfiable on a cyclic model, confirmed on the explicit
    /// belief-observation MDP.
    ConfirmedExplicit,
    /// Game verdict unsatisfiable on a cyclic model, overturned by the
    /// explicit belief-observation MDP.
    OverturnedExplicit,
    /// Game verdict unsatisfiable on a cyclic model whose explicit
    /// belief-observation MDP exceeds the cap. May be incomplete.
    GameOnly,
}

/// One record of the per-iteration statistics stream.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub bound: Option<usize>,
    pub explored: usize,
    pub game_nodes: usize,
    pub frontier: usize,
    pub winning_antichain: usize,
    pub losing_antichain: usize,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub peak_slice: usize,
    pub explored: usize,
    pub wall_time_ms: u128,
    pub records: Vec<IterationStats>,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub verdict: Verdict,
    /// Present iff satisfiable.
    pub policy: Option<BeliefFsc>,
    pub resolution: Resolution,
    pub stats: SolveStats,
}

impl SolveOutcome {
    /// False only for unsatisfiable verdicts that could not be confirmed.
    pub fn is_complete(&self) -> bool {
        self.resolution != Resolution::GameOnly
    }
}

/// `Bound[i]` for the default schedule: `max(1024, |S|·|I|)` doubled per step.
pub fn bound_schedule(iteration: usize, m: &Memdp) -> usize {
    scheduled_bound(iteration, initial_bound(m), 2)
}

fn initial_bound(m: &Memdp) -> usize {
    1024usize.max(m.num_states().saturating_mul(m.num_envs()))
}

fn scheduled_bound(iteration: usize, bound0: usize, growth: usize) -> usize {
    assert!(iteration >= 1, "iterations are numbered from one");
    let mut b = bound0;
    for _ in 1..iteration {
        b = b.saturating_mul(growth.max(1));
    }
    b
}

/// Winning and losing observations found by analysing each environment alone.
/// `⟨s, {i}⟩` is winning iff `s` wins almost surely in environment `i`; if not,
/// every belief containing `i` loses at `s`. Targets win for every belief.
pub fn preprocess(m: &Memdp) -> (RegionStore, RegionStore) {
    let per_env: Vec<Vec<bool>> = (0..m.num_envs())
        .into_par_iter()
        .map(|i| as_win_mdp(m, i, m.target_mask()))
        .collect();
    let n = m.num_envs();
    let mut won = RegionStore::winning(m.num_states());
    let mut lost = RegionStore::losing(m.num_states());
    for t in m.targets() {
        won.insert(t, m.all_envs());
    }
    for (i, w) in per_env.iter().enumerate() {
        for s in 0..m.num_states() {
            if m.is_target(s) {
                continue;
            }
            if w[s] {
                won.insert(s, EnvSet::singleton(n, i));
            } else {
                lost.insert(s, EnvSet::singleton(n, i));
            }
        }
    }
    (won, lost)
}

fn initial_observations(m: &Memdp) -> Vec<Observation> {
    let mut v: Vec<Observation> = m
        .initial_states()
        .map(|s| Observation::new(s, m.all_envs()))
        .collect();
    v.dedup();
    v
}

fn decided(m: &Memdp, won: &RegionStore, lost: &RegionStore) -> Option<Verdict> {
    let init = initial_observations(m);
    if init.iter().any(|o| lost.contains(o.state, &o.belief)) {
        Some(Verdict::Unsatisfiable)
    } else if init.iter().all(|o| won.contains(o.state, &o.belief)) {
        Some(Verdict::Satisfiable)
    } else {
        None
    }
}

/// Decides whether one policy wins almost surely in every environment and
/// returns such a policy if so.
pub fn find_policy(m: &Memdp, opts: &SolveOptions) -> Result<SolveOutcome, SolveError> {
    find_policy_with_observer(m, opts, |_| {})
}

/// [`find_policy`] reporting each iteration to `observer`.
pub fn find_policy_with_observer<F>(
    m: &Memdp,
    opts: &SolveOptions,
    mut observer: F,
) -> Result<SolveOutcome, SolveError>
where
    F: FnMut(&IterationStats),
{
    if m.targets().next().is_none() {
        return Err(SolveError::NoTargets);
    }
    let start = Instant::now();
    let deadline = opts.timeout.map(|t| start + t);
    let limits = SliceLimits {
        max_nodes: opts.memcap,
        deadline,
    };
    let (mut won, mut lost) = preprocess(m);
    let mut stats = SolveStats::default();
    let bound0 = opts.bound0.unwrap_or_else(|| initial_bound(m)).max(1);
    let mut stagnant = 0;
    let mut verdict = decided(m, &won, &lost);

    while verdict.is_none() {
        stats.iterations += 1;
        let iteration = stats.iterations;
        let bound = if stagnant >= opts.stagnation {
            None
        } else {
            Some(scheduled_bound(iteration, bound0, opts.growth))
        };
        log::debug!("iteration {iteration}, bound {bound:?}");
        let slice = generate_game_slice_with(
            m,
            &won,
            &lost,
            bound.unwrap_or(usize::MAX),
            opts.heuristic,
            &limits,
        )?;
        let game = &slice.game;
        let complete = slice.is_complete();
        let mut grew = false;
        if opts.bounds.lower() || complete {
            let win = game.win(&game.mask_of(&[Label::Target, Label::Winning]));
            for (v, node) in game.p1_nodes().iter().enumerate() {
                if win[v] && node.label == Label::Explored {
                    grew |= won.insert(node.obs.state, node.obs.belief.clone());
                }
            }
        }
        if opts.bounds.upper() || complete {
            let win = game.win(&game.mask_of(&[Label::Target, Label::Winning, Label::Frontier]));
            for (v, node) in game.p1_nodes().iter().enumerate() {
                if !win[v] && node.label == Label::Explored {
                    grew |= lost.insert(node.obs.state, node.obs.belief.clone());
                }
            }
        }
        stagnant = if grew { 0 } else { stagnant + 1 };
        let nodes = game.num_p1() + game.num_p2();
        stats.peak_slice = stats.peak_slice.max(nodes);
        stats.explored += slice.explored;
        let record = IterationStats {
            iteration,
            bound,
            explored: slice.explored,
            game_nodes: nodes,
            frontier: slice.frontier.len(),
            winning_antichain: won.size(),
            losing_antichain: lost.size(),
            elapsed_ms: start.elapsed().as_millis(),
        };
        observer(&record);
        stats.records.push(record);
        verdict = decided(m, &won, &lost);
        if verdict.is_none() && complete {
            // A complete slice decides every initial observation.
            unreachable!("complete slice left the initial observations undecided");
        }
        if let Some(d) = deadline {
            if verdict.is_none() && Instant::now() > d {
                return Err(SolveError::ResourceLimit("timeout".into()));
            }
        }
    }

    let verdict = verdict.expect("loop exits decided");
    let mut outcome = match verdict {
        Verdict::Satisfiable => SolveOutcome {
            verdict,
            policy: Some(extract_policy(m, &won).expect("initial observations are winning")),
            resolution: Resolution::Game,
            stats: SolveStats::default(),
        },
        Verdict::Unsatisfiable => confirm_unsat(m, opts),
    };
    stats.wall_time_ms = start.elapsed().as_millis();
    outcome.stats = stats;
    Ok(outcome)
}

/// The game is incomplete on cyclic models: player 2 may switch environments
/// forever. Recheck such verdicts on the explicit belief-observation MDP.
fn confirm_unsat(m: &Memdp, opts: &SolveOptions) -> SolveOutcome {
    let unsat = |resolution| SolveOutcome {
        verdict: Verdict::Unsatisfiable,
        policy: None,
        resolution,
        stats: SolveStats::default(),
    };
    if is_acyclic(m) {
        return unsat(Resolution::Game);
    }
    if opts.bomdp_cap == 0 {
        return unsat(Resolution::GameOnly);
    }
    let b = match Bomdp::build(m, opts.bomdp_cap) {
        Ok(b) => b,
        Err(e) => {
            log::warn!("{e}; unsatisfiable verdict rests on the game abstraction");
            return unsat(Resolution::GameOnly);
        }
    };
    let goal: Vec<bool> = (0..b.num_observations()).map(|z| b.is_target(z)).collect();
    let win = b.win_mask(&goal);
    if b.initial().iter().all(|&z| win[z]) {
        let policy = BeliefFsc::from_allowed(m, |obs| {
            let z = b.obs_index(obs).expect("reachable observation");
            b.safe_actions(z, &win)
        })
        .expect("winning observations have safe actions");
        SolveOutcome {
            verdict: Verdict::Satisfiable,
            policy: Some(policy),
            resolution: Resolution::OverturnedExplicit,
            stats: SolveStats::default(),
        }
    } else {
        unsat(Resolution::ConfirmedExplicit)
    }
}

/// Uniform controller over the actions that keep every successor observation
/// inside `won` or at a target.
pub fn extract_policy(m: &Memdp, won: &RegionStore) -> Result<BeliefFsc, PolicyError> {
    for o in initial_observations(m) {
        if !won.contains(o.state, &o.belief) {
            return Err(PolicyError::NotWinning {
                state: m.state_name(o.state).to_string(),
                belief: o.belief.to_string(),
            });
        }
    }
    BeliefFsc::from_allowed(m, |obs| {
        (0..m.num_actions())
            .filter(|&a| {
                m.support(obs.state, a).iter().all(|e| {
                    let up = obs.belief.intersection(&e.envs);
                    up.is_empty() || m.is_target(e.succ) || won.contains(e.succ, &up)
                })
            })
            .collect()
    })
    .map_err(|obs| PolicyError::NotWinning {
        state: m.state_name(obs.state).to_string(),
        belief: obs.belief.to_string(),
    })
}
