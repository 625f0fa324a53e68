//! Enumeration oracle for belief-support games.
//!
//! Memoryless deterministic strategies suffice for player 1 in turn-based
//! stochastic reachability games. For a fixed strategy, a node loses iff
//! player 2 together with chance can reach, with positive probability, a
//! region where player 2 keeps the play away from the goal forever.

use crate::bsg::{Bsg, Label};
use crate::error::SizeCapExceeded;

/// Player-1 nodes winning for `goal`, by enumerating player-1 strategies
/// separately for each start node. Gives up after `cap` search nodes.
pub fn win_sg_brute_force(g: &Bsg, goal: &[bool], cap: usize) -> Result<Vec<bool>, SizeCapExceeded> {
    let mut search = Search {
        g,
        goal,
        action: vec![None; g.num_p1()],
        visited: 0,
        cap,
    };
    (0..g.num_p1())
        .map(|v| {
            if goal[v] {
                return Ok(true);
            }
            search.action.iter_mut().for_each(|a| *a = None);
            search.run(v)
        })
        .collect()
}

struct Search<'a> {
    g: &'a Bsg,
    goal: &'a [bool],
    action: Vec<Option<usize>>,
    visited: usize,
    cap: usize,
}

impl Search<'_> {
    fn expandable(&self, v: usize) -> bool {
        !self.goal[v] && self.g.label(v) == Label::Explored
    }

    /// Choices of `v` under its assigned action, each a successor list.
    fn choices(&self, v: usize) -> impl Iterator<Item = &Vec<usize>> + '_ {
        let moves = self.g.moves(v);
        self.action[v]
            .into_iter()
            .flat_map(move |a| moves[a].choices.iter().map(|c| &c.succs))
    }

    /// `None` if `start` already loses, otherwise the reachable unassigned
    /// nodes in discovery order.
    fn check(&self, start: usize) -> Option<Vec<usize>> {
        let n = self.g.num_p1();
        let mut reach = vec![false; n];
        let mut order = vec![start];
        reach[start] = true;
        let mut open = Vec::new();
        let mut k = 0;
        while k < order.len() {
            let v = order[k];
            k += 1;
            if self.expandable(v) && self.action[v].is_none() {
                open.push(v);
                continue;
            }
            for succs in self.choices(v) {
                for &w in succs {
                    if !reach[w] {
                        reach[w] = true;
                        order.push(w);
                    }
                }
            }
        }
        // Unassigned nodes count as goal; absorbing non-goal nodes as traps.
        let goalish = |v: usize| self.goal[v] || (self.expandable(v) && self.action[v].is_none());
        // Nodes where player 2 avoids the goal forever.
        let mut trap: Vec<bool> = (0..n).map(|v| reach[v] && !goalish(v)).collect();
        loop {
            let mut changed = false;
            for &v in &order {
                if trap[v] && self.action[v].is_some() {
                    let keeps = self
                        .choices(v)
                        .any(|succs| succs.iter().all(|&w| trap[w]));
                    if !keeps {
                        trap[v] = false;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        // Nodes from which player 2 reaches the trap with positive probability.
        let mut bad = trap;
        loop {
            let mut changed = false;
            for &v in &order {
                if !bad[v] && !goalish(v) {
                    let reaches = self.choices(v).any(|succs| succs.iter().any(|&w| bad[w]));
                    if reaches {
                        bad[v] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if bad[start] {
            None
        } else {
            Some(open)
        }
    }

    fn run(&mut self, start: usize) -> Result<bool, SizeCapExceeded> {
        self.visited += 1;
        if self.visited > self.cap {
            return Err(SizeCapExceeded {
                what: "game strategy enumeration",
                cap: self.cap,
            });
        }
        let Some(open) = self.check(start) else {
            return Ok(false);
        };
        let Some(&v) = open.last() else {
            return Ok(true);
        };
        for a in 0..self.g.num_actions() {
            self.action[v] = Some(a);
            if self.run(start)? {
                self.action[v] = None;
                return Ok(true);
            }
        }
        self.action[v] = None;
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen::{gen_random, running_example, RandomParams};
    use crate::bomdp::{Bomdp, DEFAULT_STATE_CAP};
    use crate::bsg::{bsg_of_bomdp, generate_game_slice, Heuristic};
    use crate::model::MemdpBuilder;
    use crate::region::RegionStore;

    fn full_game(m: &crate::Memdp) -> Bsg {
        let w = RegionStore::winning(m.num_states());
        let l = RegionStore::losing(m.num_states());
        generate_game_slice(m, &w, &l, usize::MAX, Heuristic::Bfs).game
    }

    #[test]
    fn direct_edge_wins() {
        let mut b = MemdpBuilder::new(["s", "t"], ["a", "b"], 2);
        b.initial(&[(0, 1.0)]).target(1);
        b.set_all(0, 1, &[(1, 1.0)]);
        let g = full_game(&b.build(Default::default()).unwrap());
        let win = win_sg_brute_force(&g, &g.mask_of(&[Label::Target]), 1000).unwrap();
        assert!(win[g.initial()[0]]);
    }

    #[test]
    fn forced_sink_loses() {
        let mut b = MemdpBuilder::new(["s", "t", "sink"], ["go"], 2);
        b.initial(&[(0, 1.0)]).target(1);
        b.set(0, 0, 0, &[(1, 1.0)]).set(1, 0, 0, &[(2, 1.0)]);
        let g = full_game(&b.build(Default::default()).unwrap());
        let win = win_sg_brute_force(&g, &g.mask_of(&[Label::Target]), 1000).unwrap();
        assert!(!win[g.initial()[0]]);
    }

    #[test]
    fn agrees_with_fixpoint_on_running_example() {
        let m = running_example();
        let g = bsg_of_bomdp(&Bomdp::build(&m, DEFAULT_STATE_CAP).unwrap());
        let goal = g.mask_of(&[Label::Target]);
        assert_eq!(win_sg_brute_force(&g, &goal, 1_000_000).unwrap(), g.win(&goal));
    }

    #[test]
    fn agrees_with_fixpoint_on_random_games() {
        let mut checked = 0;
        for seed in 0..120 {
            let m = gen_random(&RandomParams::new(seed, 5, 3, 3, seed % 2 == 0));
            let g = full_game(&m);
            if g.num_p1() > 30 {
                continue;
            }
            checked += 1;
            let goal = g.mask_of(&[Label::Target]);
            assert_eq!(
                win_sg_brute_force(&g, &goal, 5_000_000).unwrap(),
                g.win(&goal),
                "seed {seed}"
            );
        }
        assert!(checked >= 60, "only {checked} games checked");
    }
}
