//! Belief-support games.
//!
//! Player 1 owns observations `⟨s, J⟩` and picks an action. Player 2 owns
//! `(observation, action)` pairs and picks the environment `j ∈ J`, after which
//! the successor is drawn from `p_j(s, a)` with the belief updated. Player-2
//! choices with identical successor sets are grouped, which keeps games over
//! hundreds of environments small.

use crate::bomdp::Bomdp;
use crate::envgraph::one_based;
use crate::envset::EnvSet;
use crate::error::SolveError;
use crate::model::{Memdp, Observation};
use crate::region::RegionStore;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::fmt::Write;
use std::str::FromStr;
use std::time::Instant;

/// Order in which slice generation expands discovered observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Heuristic {
    /// First discovered first.
    Bfs,
    /// Last discovered first.
    Dfs,
    /// Smallest belief first.
    Entropy,
    /// Largest belief first.
    #[default]
    NegEntropy,
}

impl Heuristic {
    pub const ALL: [Heuristic; 4] = [
        Heuristic::Bfs,
        Heuristic::Dfs,
        Heuristic::Entropy,
        Heuristic::NegEntropy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Heuristic::Bfs => "bfs",
            Heuristic::Dfs => "dfs",
            Heuristic::Entropy => "entropy",
            Heuristic::NegEntropy => "negentropy",
        }
    }
}

impl FromStr for Heuristic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Heuristic::ALL
            .into_iter()
            .find(|h| h.name() == s)
            .ok_or_else(|| format!("unknown heuristic `{s}`"))
    }
}

/// Status of a player-1 node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    /// Expanded; has one player-2 node per action.
    Explored,
    /// Discovered but not expanded. Absorbing.
    Frontier,
    /// Target state. Absorbing.
    Target,
    /// Known winning. Absorbing.
    Winning,
    /// Known losing. Absorbing.
    Losing,
}

/// A group of player-2 choices leading to the same successor nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Choice {
    pub envs: EnvSet,
    pub succs: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct P2Node {
    pub owner: usize,
    pub action: usize,
    pub choices: Vec<Choice>,
}

#[derive(Debug, Clone)]
pub struct P1Node {
    pub obs: Observation,
    pub label: Label,
    /// Player-2 nodes `p2[first .. first + num_actions]` when explored.
    pub first_p2: usize,
}

#[derive(Debug, Clone)]
pub struct Bsg {
    num_actions: usize,
    p1: Vec<P1Node>,
    p2: Vec<P2Node>,
    index: HashMap<Observation, usize>,
    initial: Vec<usize>,
}

impl Bsg {
    pub fn num_p1(&self) -> usize {
        self.p1.len()
    }

    pub fn num_p2(&self) -> usize {
        self.p2.len()
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn p1(&self, v: usize) -> &P1Node {
        &self.p1[v]
    }

    pub fn p1_nodes(&self) -> &[P1Node] {
        &self.p1
    }

    pub fn p2(&self, u: usize) -> &P2Node {
        &self.p2[u]
    }

    /// Player-2 nodes of `v`, one per action; empty unless explored.
    pub fn moves(&self, v: usize) -> &[P2Node] {
        let node = &self.p1[v];
        if node.label == Label::Explored {
            &self.p2[node.first_p2..node.first_p2 + self.num_actions]
        } else {
            &[]
        }
    }

    pub fn node_of(&self, obs: &Observation) -> Option<usize> {
        self.index.get(obs).copied()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn label(&self, v: usize) -> Label {
        self.p1[v].label
    }

    /// Player-1 nodes carrying one of `labels`.
    pub fn mask_of(&self, labels: &[Label]) -> Vec<bool> {
        self.p1.iter().map(|n| labels.contains(&n.label)).collect()
    }

    /// Player-1 nodes from which player 1 reaches `goal` with probability one
    /// against every player-2 strategy.
    ///
    /// Computes `νY. μX. goal ∪ {v | ∃a: all successors of (v,a) in Y and every
    /// player-2 choice has a successor in X}`.
    pub fn win(&self, goal: &[bool]) -> Vec<bool> {
        let n1 = self.p1.len();
        // Flattened choices with owning player-2 node.
        let mut choice_owner: Vec<u32> = Vec::new();
        let mut choice_start: Vec<usize> = Vec::with_capacity(self.p2.len() + 1);
        for (u, node) in self.p2.iter().enumerate() {
            choice_start.push(choice_owner.len());
            choice_owner.extend(std::iter::repeat_n(u as u32, node.choices.len()));
        }
        choice_start.push(choice_owner.len());
        let nc = choice_owner.len();

        // Successor node -> choices containing it (CSR).
        let mut count = vec![0usize; n1 + 1];
        for node in &self.p2 {
            for c in &node.choices {
                for &w in &c.succs {
                    count[w] += 1;
                }
            }
        }
        let mut start = vec![0usize; n1 + 1];
        for w in 0..n1 {
            start[w + 1] = start[w] + count[w];
        }
        let mut fill = start.clone();
        let mut preds = vec![0u32; start[n1]];
        let mut c_id = 0;
        for node in &self.p2 {
            for c in &node.choices {
                for &w in &c.succs {
                    preds[fill[w]] = c_id as u32;
                    fill[w] += 1;
                }
                c_id += 1;
            }
        }

        let mut y = vec![true; n1];
        loop {
            let safe: Vec<bool> = self
                .p2
                .iter()
                .map(|node| node.choices.iter().all(|c| c.succs.iter().all(|&w| y[w])))
                .collect();
            let mut pending: Vec<u32> = self.p2.iter().map(|n| n.choices.len() as u32).collect();
            let mut hit = vec![false; nc];
            let mut x = vec![false; n1];
            let mut queue: Vec<usize> = Vec::new();
            for v in 0..n1 {
                if goal[v] {
                    x[v] = true;
                    queue.push(v);
                }
            }
            while let Some(w) = queue.pop() {
                for &c in &preds[start[w]..start[w + 1]] {
                    let c = c as usize;
                    let u = choice_owner[c] as usize;
                    if !safe[u] || hit[c] {
                        continue;
                    }
                    hit[c] = true;
                    pending[u] -= 1;
                    if pending[u] == 0 {
                        let v = self.p2[u].owner;
                        if !x[v] {
                            x[v] = true;
                            queue.push(v);
                        }
                    }
                }
            }
            if x == y {
                return y;
            }
            y = x;
        }
    }

    /// DOT digraph: player-1 nodes as boxes annotated with their label,
    /// player-2 nodes as points, choice edges labelled with environments.
    pub fn to_dot(&self, m: &Memdp) -> String {
        let mut out = String::from("digraph bsg {\n");
        for (v, node) in self.p1.iter().enumerate() {
            let style = match node.label {
                Label::Explored => "",
                Label::Frontier => ", style=dashed",
                Label::Target => ", peripheries=2",
                Label::Winning => ", color=green",
                Label::Losing => ", color=red",
            };
            let _ = writeln!(
                out,
                "  p{v} [shape=box, label=\"{}, {}\"{style}];",
                m.state_name(node.obs.state),
                one_based(&node.obs.belief)
            );
        }
        for (u, node) in self.p2.iter().enumerate() {
            let _ = writeln!(out, "  q{u} [shape=point];");
            let _ = writeln!(
                out,
                "  p{} -> q{u} [label=\"{}\"];",
                node.owner,
                m.action_name(node.action)
            );
            for c in &node.choices {
                for &w in &c.succs {
                    let _ = writeln!(out, "  q{u} -> p{w} [label=\"{}\"];", one_based(&c.envs));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Groups the environments of `belief` by the set of successors they produce.
/// `entries` lists each successor with the environments leading to it.
pub(crate) fn group_choices(belief: &EnvSet, entries: &[(usize, EnvSet)]) -> Vec<Choice> {
    let mut groups: Vec<EnvSet> = vec![belief.clone()];
    for (_, envs) in entries {
        let mut refined = Vec::with_capacity(groups.len() + 1);
        for g in groups {
            let inside = g.intersection(envs);
            if inside.is_empty() || inside == g {
                refined.push(g);
            } else {
                refined.push(g.difference(envs));
                refined.push(inside);
            }
        }
        groups = refined;
    }
    groups
        .into_iter()
        .map(|g| {
            let succs = entries
                .iter()
                .filter(|(_, envs)| g.is_subset(envs))
                .map(|(w, _)| *w)
                .collect();
            Choice { envs: g, succs }
        })
        .collect()
}

/// The game over all observations of an explicit BOMDP. Target observations
/// are absorbing, frontier observations of the BOMDP stay frontier.
pub fn bsg_of_bomdp(b: &Bomdp) -> Bsg {
    let na = b.num_actions();
    let mut p1 = Vec::with_capacity(b.num_observations());
    let mut p2 = Vec::new();
    let mut index = HashMap::new();
    for (z, obs) in b.observations().iter().enumerate() {
        index.insert(obs.clone(), z);
        let label = if b.is_target(z) {
            Label::Target
        } else if b.is_frontier(z) {
            Label::Frontier
        } else {
            Label::Explored
        };
        let first_p2 = p2.len();
        if label == Label::Explored {
            for a in 0..na {
                let entries: Vec<(usize, EnvSet)> = b
                    .edges(z, a)
                    .iter()
                    .map(|e| (e.succ, e.envs.clone()))
                    .collect();
                p2.push(P2Node {
                    owner: z,
                    action: a,
                    choices: group_choices(&obs.belief, &entries),
                });
            }
        }
        p1.push(P1Node {
            obs: obs.clone(),
            label,
            first_p2,
        });
    }
    Bsg {
        num_actions: na,
        p1,
        p2,
        index,
        initial: b.initial().to_vec(),
    }
}

/// A sliced game together with its unexplored frontier.
#[derive(Debug, Clone)]
pub struct SliceResult {
    pub game: Bsg,
    /// Player-1 nodes discovered but not expanded nor pre-labelled.
    pub frontier: Vec<usize>,
    pub explored: usize,
}

impl SliceResult {
    pub fn is_complete(&self) -> bool {
        self.frontier.is_empty()
    }
}

/// Resource limits checked during slice generation.
#[derive(Debug, Clone, Copy, Default)]
pub struct SliceLimits {
    /// Maximum number of game nodes (both players).
    pub max_nodes: Option<usize>,
    pub deadline: Option<Instant>,
}

enum Queue {
    Fifo(VecDeque<usize>),
    Lifo(Vec<usize>),
    /// Keyed by (belief-size key, discovery order).
    Heap(BinaryHeap<Reverse<(usize, usize)>>, bool),
}

impl Queue {
    fn new(h: Heuristic) -> Self {
        match h {
            Heuristic::Bfs => Queue::Fifo(VecDeque::new()),
            Heuristic::Dfs => Queue::Lifo(Vec::new()),
            Heuristic::Entropy => Queue::Heap(BinaryHeap::new(), false),
            Heuristic::NegEntropy => Queue::Heap(BinaryHeap::new(), true),
        }
    }

    fn push(&mut self, v: usize, belief_size: usize) {
        match self {
            Queue::Fifo(q) => q.push_back(v),
            Queue::Lifo(q) => q.push(v),
            Queue::Heap(q, largest) => {
                let key = if *largest {
                    usize::MAX - belief_size
                } else {
                    belief_size
                };
                q.push(Reverse((key, v)));
            }
        }
    }

    fn pop(&mut self) -> Option<usize> {
        match self {
            Queue::Fifo(q) => q.pop_front(),
            Queue::Lifo(q) => q.pop(),
            Queue::Heap(q, _) => q.pop().map(|Reverse((_, v))| v),
        }
    }

    fn drain(self) -> Vec<usize> {
        let mut v: Vec<usize> = match self {
            Queue::Fifo(q) => q.into_iter().collect(),
            Queue::Lifo(q) => q,
            Queue::Heap(q, _) => q.into_iter().map(|Reverse((_, v))| v).collect(),
        };
        v.sort_unstable();
        v
    }
}

/// Explores the game from the initial observations in `heuristic` order,
/// expanding at most `bound` nodes. Targets and observations covered by `won`
/// or `lost` are labelled and left unexpanded.
pub fn generate_game_slice(
    m: &Memdp,
    won: &RegionStore,
    lost: &RegionStore,
    bound: usize,
    heuristic: Heuristic,
) -> SliceResult {
    generate_game_slice_with(m, won, lost, bound, heuristic, &SliceLimits::default())
        .expect("no limits were set")
}

/// [`generate_game_slice`] with resource limits.
pub fn generate_game_slice_with(
    m: &Memdp,
    won: &RegionStore,
    lost: &RegionStore,
    bound: usize,
    heuristic: Heuristic,
    limits: &SliceLimits,
) -> Result<SliceResult, SolveError> {
    let na = m.num_actions();
    let mut p1: Vec<P1Node> = Vec::new();
    let mut p2: Vec<P2Node> = Vec::new();
    let mut index: HashMap<Observation, usize> = HashMap::new();
    let mut queue = Queue::new(heuristic);

    let discover = |obs: Observation,
                        p1: &mut Vec<P1Node>,
                        index: &mut HashMap<Observation, usize>,
                        queue: &mut Queue|
     -> usize {
        if let Some(&v) = index.get(&obs) {
            return v;
        }
        let label = if m.is_target(obs.state) {
            Label::Target
        } else if won.contains(obs.state, &obs.belief) {
            Label::Winning
        } else if lost.contains(obs.state, &obs.belief) {
            Label::Losing
        } else {
            Label::Frontier
        };
        let v = p1.len();
        if label == Label::Frontier {
            queue.push(v, obs.belief.len());
        }
        index.insert(obs.clone(), v);
        p1.push(P1Node {
            obs,
            label,
            first_p2: 0,
        });
        v
    };

    let mut initial = Vec::new();
    for s in m.initial_states() {
        let v = discover(
            Observation::new(s, m.all_envs()),
            &mut p1,
            &mut index,
            &mut queue,
        );
        if !initial.contains(&v) {
            initial.push(v);
        }
    }

    let mut explored = 0;
    let mut entries: Vec<(usize, EnvSet)> = Vec::new();
    while explored < bound {
        let Some(v) = queue.pop() else { break };
        explored += 1;
        if explored % 1024 == 0 {
            if let Some(deadline) = limits.deadline {
                if Instant::now() > deadline {
                    return Err(SolveError::ResourceLimit("timeout".into()));
                }
            }
        }
        let obs = p1[v].obs.clone();
        p1[v].label = Label::Explored;
        p1[v].first_p2 = p2.len();
        for a in 0..na {
            entries.clear();
            for e in m.support(obs.state, a) {
                let up = obs.belief.intersection(&e.envs);
                if up.is_empty() {
                    continue;
                }
                let w = discover(
                    Observation::new(e.succ, up.clone()),
                    &mut p1,
                    &mut index,
                    &mut queue,
                );
                entries.push((w, up));
            }
            p2.push(P2Node {
                owner: v,
                action: a,
                choices: group_choices(&obs.belief, &entries),
            });
        }
        if let Some(cap) = limits.max_nodes {
            if p1.len() + p2.len() > cap {
                return Err(SolveError::ResourceLimit(format!(
                    "game exceeds {cap} nodes"
                )));
            }
        }
    }
    let frontier = queue.drain();
    Ok(SliceResult {
        game: Bsg {
            num_actions: na,
            p1,
            p2,
            index,
            initial,
        },
        frontier,
        explored,
    })
}
