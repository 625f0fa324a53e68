use crate::error::PolicyError;
use crate::model::{Memdp, Observation, PROB_TOLERANCE};
use crate::policy::BeliefFsc;
use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvVerdict {
    pub env: usize,
    pub pass: bool,
    /// A reachable memory node from which the target is unreachable.
    pub witness: Option<Observation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub envs: Vec<EnvVerdict>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.envs.iter().all(|e| e.pass)
    }

    pub fn failing(&self) -> Vec<usize> {
        self.envs.iter().filter(|e| !e.pass).map(|e| e.env).collect()
    }
}

/// Checks that `fsc` reaches the targets with probability one in every
/// environment. The product of memory and model state collapses to the memory
/// node, because each node fixes its state.
pub fn verify_policy(m: &Memdp, fsc: &BeliefFsc) -> Result<VerifyReport, PolicyError> {
    check_consistency(m, fsc)?;
    let envs = (0..m.num_envs()).map(|i| verify_env(m, fsc, i)).collect();
    Ok(VerifyReport { envs })
}

fn inconsistent(msg: String) -> Result<(), PolicyError> {
    Err(PolicyError::InconsistentFsc(msg))
}

fn check_consistency(m: &Memdp, fsc: &BeliefFsc) -> Result<(), PolicyError> {
    let n = fsc.nodes.len();
    if fsc.actions.len() != n || fsc.updates.len() != n {
        return inconsistent("table lengths differ from the node count".into());
    }
    for node in &fsc.nodes {
        if node.state >= m.num_states() || node.belief.is_empty() {
            return inconsistent(format!("invalid node {node:?}"));
        }
        if !node.belief.is_subset(&m.all_envs()) || node.belief.capacity() != m.all_envs().capacity()
        {
            return inconsistent(format!("belief {} out of range", node.belief));
        }
    }
    for s in m.initial_states() {
        match fsc.initial_node(s) {
            Some(k) if k < n && fsc.nodes[k] == Observation::new(s, m.all_envs()) => {}
            Some(k) => return inconsistent(format!("initial node {k} for state {s} is not ⟨s, I⟩")),
            None => return inconsistent(format!("no initial node for state {s}")),
        }
    }
    for (k, node) in fsc.nodes.iter().enumerate() {
        let dist = &fsc.actions[k];
        let sum: f64 = dist.iter().map(|e| e.1).sum();
        if (sum - 1.0).abs() > PROB_TOLERANCE
            || dist.iter().any(|&(a, p)| a >= m.num_actions() || !(0.0..=1.0).contains(&p))
        {
            return inconsistent(format!("node {k} has an invalid action distribution"));
        }
        if m.is_target(node.state) {
            continue;
        }
        for &(a, p) in dist {
            if p <= 0.0 {
                continue;
            }
            for e in m.support(node.state, a) {
                let up = node.belief.intersection(&e.envs);
                if up.is_empty() {
                    continue;
                }
                match fsc.updates[k].get(&(a, e.succ)) {
                    Some(&t) if t < n && fsc.nodes[t] == Observation::new(e.succ, up.clone()) => {}
                    Some(&t) => {
                        return inconsistent(format!(
                            "node {k}: update on ({}, {}) goes to node {t}, expected belief {up}",
                            m.action_name(a),
                            m.state_name(e.succ)
                        ))
                    }
                    None => {
                        return inconsistent(format!(
                            "node {k}: no update on ({}, {})",
                            m.action_name(a),
                            m.state_name(e.succ)
                        ))
                    }
                }
            }
        }
    }
    Ok(())
}

fn verify_env(m: &Memdp, fsc: &BeliefFsc, env: usize) -> EnvVerdict {
    let n = fsc.nodes.len();
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, node) in fsc.nodes.iter().enumerate() {
        // Nodes whose belief excludes `env` are unreachable in it.
        if m.is_target(node.state) || !node.belief.contains(env) {
            continue;
        }
        for a in fsc.support(k) {
            for s in m.transition(env, node.state, a).support() {
                let t = fsc.updates[k][&(a, s)];
                if !succs[k].contains(&t) {
                    succs[k].push(t);
                }
            }
        }
    }
    let mut reach = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for s in m.initial_states() {
        let k = fsc.initial_node(s).expect("checked");
        if !reach[k] {
            reach[k] = true;
            queue.push_back(k);
        }
    }
    while let Some(k) = queue.pop_front() {
        for &t in &succs[k] {
            if !reach[t] {
                reach[t] = true;
                queue.push_back(t);
            }
        }
    }
    // Backward reachability of target nodes.
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, ss) in succs.iter().enumerate() {
        for &t in ss {
            preds[t].push(k);
        }
    }
    let mut good = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&k| m.is_target(fsc.nodes[k].state)).collect();
    for &k in &stack {
        good[k] = true;
    }
    while let Some(k) = stack.pop() {
        for &p in &preds[k] {
            if !good[p] {
                good[p] = true;
                stack.push(p);
            }
        }
    }
    let Some(mut cur) = (0..n).find(|&k| reach[k] && !good[k]) else {
        return EnvVerdict {
            env,
            pass: true,
            witness: None,
        };
    };
    // Descend towards a bottom component of the failing region.
    let mut visited = vec![false; n];
    visited[cur] = true;
    while let Some(&t) = succs[cur].iter().find(|&&t| !visited[t]) {
        visited[t] = true;
        cur = t;
    }
    EnvVerdict {
        env,
        pass: false,
        witness: Some(fsc.nodes[cur].clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen::running_example;
    use crate::solver::{find_policy, SolveOptions};
    use crate::EnvSet;

    #[test]
    fn always_guessing_a1_fails_in_two_and_three() {
        let m = running_example();
        let a1 = m.action_index("a1").unwrap();
        let fsc = BeliefFsc::from_allowed(&m, |_| vec![a1]).unwrap();
        let report = verify_policy(&m, &fsc).unwrap();
        assert_eq!(report.failing(), vec![1, 2]);
        let bad = m.state_index("bad").unwrap();
        for e in &report.envs[1..] {
            assert_eq!(e.witness.as_ref().unwrap().state, bad);
        }
        assert!(report.envs[0].pass);
    }

    #[test]
    fn solver_policy_passes() {
        let m = running_example();
        let fsc = find_policy(&m, &SolveOptions::default()).unwrap().policy.unwrap();
        let report = verify_policy(&m, &fsc).unwrap();
        assert!(report.all_pass());
        assert_eq!(report.envs.len(), 3);
    }

    #[test]
    fn tampered_update_is_inconsistent() {
        let m = running_example();
        let mut fsc = find_policy(&m, &SolveOptions::default()).unwrap().policy.unwrap();
        let k = fsc.updates.iter().position(|u| !u.is_empty()).unwrap();
        let key = *fsc.updates[k].keys().next().unwrap();
        let wrong = (0..fsc.num_nodes()).find(|&t| t != fsc.updates[k][&key]).unwrap();
        fsc.updates[k].insert(key, wrong);
        assert!(matches!(
            verify_policy(&m, &fsc),
            Err(PolicyError::InconsistentFsc(_))
        ));
    }

    #[test]
    fn single_environment_witness_policy_passes() {
        let m = running_example();
        let (m1, _) = m.restrict_envs(&EnvSet::singleton(3, 0)).unwrap();
        let fsc = find_policy(&m1, &SolveOptions::default()).unwrap().policy.unwrap();
        assert!(verify_policy(&m1, &fsc).unwrap().all_pass());
    }
}
