//! JSON model and policy files.
//!
//! Keys are written in sorted order and floats in their shortest round-trip
//! form, so serializing a parsed file is a normalization: a second pass
//! reproduces it byte for byte. Environment subsets are sorted arrays of
//! zero-based environment indices.

use crate::envset::EnvSet;
use crate::error::{FormatError, ModelError};
use crate::model::{Completion, Memdp, MemdpBuilder, Observation};
use crate::policy::BeliefFsc;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

pub const FORMAT_VERSION: u32 = 1;

type Row = BTreeMap<String, f64>;

/// On-disk model. Rows missing from an environment are self-loops.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub actions: Vec<String>,
    /// Per environment: state → action → successor → probability.
    pub environments: Vec<BTreeMap<String, BTreeMap<String, Row>>>,
    pub format_version: u32,
    pub initial: Row,
    pub states: Vec<String>,
    pub targets: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyNode {
    pub actions: Row,
    pub belief: Vec<usize>,
    pub state: String,
    /// action → next state → node index.
    pub updates: BTreeMap<String, BTreeMap<String, usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyFile {
    pub format_version: u32,
    /// initial state → node index.
    pub initial: BTreeMap<String, usize>,
    pub nodes: Vec<PolicyNode>,
}

fn index_of(names: &[String]) -> HashMap<&str, usize> {
    names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect()
}

fn lookup(index: &HashMap<&str, usize>, name: &str, err: fn(String) -> ModelError) -> Result<usize, ModelError> {
    index.get(name).copied().ok_or_else(|| err(name.to_string()))
}

pub fn parse_model(text: &str) -> Result<Memdp, FormatError> {
    let file: ModelFile = serde_json::from_str(text)?;
    model_from_file(&file)
}

pub fn model_from_file(file: &ModelFile) -> Result<Memdp, FormatError> {
    if file.format_version != FORMAT_VERSION {
        return Err(FormatError::Version(file.format_version));
    }
    let states = index_of(&file.states);
    let actions = index_of(&file.actions);
    let state = |n: &str| lookup(&states, n, ModelError::UnknownStateRef);
    let dist = |row: &Row| -> Result<Vec<(usize, f64)>, ModelError> {
        row.iter().map(|(n, &p)| Ok((state(n)?, p))).collect()
    };
    let mut b = MemdpBuilder::new(file.states.clone(), file.actions.clone(), file.environments.len());
    b.initial(&dist(&file.initial)?);
    for t in &file.targets {
        b.target(state(t)?);
    }
    for (env, table) in file.environments.iter().enumerate() {
        for (s, rows) in table {
            let s = state(s)?;
            for (a, row) in rows {
                let a = lookup(&actions, a, ModelError::UnknownActionRef)?;
                b.set(env, s, a, &dist(row)?);
            }
        }
    }
    Ok(b.build(Completion::SelfLoop)?)
}

pub fn model_to_file(m: &Memdp) -> ModelFile {
    let names = m.state_names();
    let row = |d: &crate::model::Dist| -> Row { d.iter().map(|(s, p)| (names[s].clone(), p)).collect() };
    let environments = (0..m.num_envs())
        .map(|env| {
            let mut table = BTreeMap::new();
            for s in 0..m.num_states() {
                let rows: BTreeMap<String, Row> = (0..m.num_actions())
                    .filter(|&a| !m.transition(env, s, a).is_dirac(s))
                    .map(|a| (m.action_name(a).to_string(), row(m.transition(env, s, a))))
                    .collect();
                if !rows.is_empty() {
                    table.insert(names[s].clone(), rows);
                }
            }
            table
        })
        .collect();
    ModelFile {
        actions: m.action_names().to_vec(),
        environments,
        format_version: FORMAT_VERSION,
        initial: row(m.initial()),
        states: names.to_vec(),
        targets: m.targets().map(|t| names[t].clone()).collect(),
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn model_to_json(m: &Memdp) -> String {
    to_json(&model_to_file(m))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("file types serialize");
    s.push('\n');
    s
}

pub fn policy_to_file(m: &Memdp, fsc: &BeliefFsc) -> PolicyFile {
    let nodes = fsc
        .nodes
        .iter()
        .enumerate()
        .map(|(i, obs)| {
            let mut updates: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
            for (&(a, succ), &n) in &fsc.updates[i] {
                updates
                    .entry(m.action_name(a).to_string())
                    .or_default()
                    .insert(m.state_name(succ).to_string(), n);
            }
            PolicyNode {
                actions: fsc.actions[i]
                    .iter()
                    .map(|&(a, p)| (m.action_name(a).to_string(), p))
                    .collect(),
                belief: obs.belief.to_vec(),
                state: m.state_name(obs.state).to_string(),
                updates,
            }
        })
        .collect();
    PolicyFile {
        format_version: FORMAT_VERSION,
        initial: fsc
            .initial
            .iter()
            .map(|&(s, n)| (m.state_name(s).to_string(), n))
            .collect(),
        nodes,
    }
}

pub fn policy_to_json(m: &Memdp, fsc: &BeliefFsc) -> String {
    to_json(&policy_to_file(m, fsc))
}

/// Parses a policy against the model it was computed for. Names must resolve
/// and beliefs must be nonempty subsets of the model's environments; the
/// semantic checks are left to [`crate::reference::verify_policy`].
pub fn parse_policy(m: &Memdp, text: &str) -> Result<BeliefFsc, FormatError> {
    let file: PolicyFile = serde_json::from_str(text)?;
    policy_from_file(m, &file)
}

pub fn policy_from_file(m: &Memdp, file: &PolicyFile) -> Result<BeliefFsc, FormatError> {
    if file.format_version != FORMAT_VERSION {
        return Err(FormatError::Version(file.format_version));
    }
    let bad = |msg: String| FormatError::Policy(msg);
    let state = |n: &str| m.state_index(n).ok_or_else(|| bad(format!("unknown state `{n}`")));
    let action = |n: &str| m.action_index(n).ok_or_else(|| bad(format!("unknown action `{n}`")));
    let num_nodes = file.nodes.len();
    let node_ref = |n: usize| {
        if n < num_nodes {
            Ok(n)
        } else {
            Err(bad(format!("node index {n} out of range")))
        }
    };
    let mut fsc = BeliefFsc {
        nodes: Vec::with_capacity(num_nodes),
        initial: Vec::new(),
        actions: Vec::with_capacity(num_nodes),
        updates: Vec::with_capacity(num_nodes),
    };
    for (i, node) in file.nodes.iter().enumerate() {
        if node.belief.is_empty() {
            return Err(bad(format!("node {i} has an empty belief")));
        }
        if let Some(&e) = node.belief.iter().find(|&&e| e >= m.num_envs()) {
            return Err(bad(format!("node {i} refers to environment {e}")));
        }
        let belief = EnvSet::from_indices(m.num_envs(), node.belief.iter().copied());
        fsc.nodes.push(Observation::new(state(&node.state)?, belief));
        let mut acts = node
            .actions
            .iter()
            .map(|(a, &p)| Ok((action(a)?, p)))
            .collect::<Result<Vec<_>, FormatError>>()?;
        acts.sort_by_key(|&(a, _)| a);
        let sum: f64 = acts.iter().map(|&(_, p)| p).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(bad(format!("node {i}: action probabilities sum to {sum}")));
        }
        fsc.actions.push(acts);
        let mut updates = BTreeMap::new();
        for (a, succs) in &node.updates {
            let a = action(a)?;
            for (s, &n) in succs {
                updates.insert((a, state(s)?), node_ref(n)?);
            }
        }
        fsc.updates.push(updates);
    }
    for (s, &n) in &file.initial {
        fsc.initial.push((state(s)?, node_ref(n)?));
    }
    fsc.initial.sort();
    Ok(fsc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen::{gen_random, running_example, RandomParams};
    use crate::solver::{find_policy, SolveOptions};
    use proptest::prelude::*;

    #[test]
    fn truncated_file_is_a_syntax_error() {
        let text = model_to_json(&running_example());
        let err = parse_model(&text[..text.len() / 2]).unwrap_err();
        assert!(matches!(err, FormatError::Syntax { line, .. } if line > 1), "{err}");
    }

    #[test]
    fn validation_errors_pass_through() {
        let mut file = model_to_file(&running_example());
        file.targets.push("nowhere".into());
        assert!(matches!(
            model_from_file(&file),
            Err(FormatError::Model(ModelError::UnknownStateRef(_)))
        ));
        let mut file = model_to_file(&running_example());
        file.initial.insert("s1".into(), 0.5);
        assert!(matches!(
            model_from_file(&file),
            Err(FormatError::Model(ModelError::NonStochasticInitial(_)))
        ));
        let mut file = model_to_file(&running_example());
        file.format_version = 9;
        assert!(matches!(model_from_file(&file), Err(FormatError::Version(9))));
    }

    #[test]
    fn normalization_is_idempotent() {
        // Explicit self-loops and unsorted keys are normalized away.
        let text = r#"{"states":["b","a"],"actions":["x"],"format_version":1,
            "initial":{"b":1.0},"targets":["a"],
            "environments":[{"b":{"x":{"a":0.5,"b":0.5}},"a":{"x":{"a":1.0}}}]}"#;
        let once = model_to_json(&parse_model(text).unwrap());
        let twice = model_to_json(&parse_model(&once).unwrap());
        assert_eq!(once, twice);
        assert!(!once.contains("\"a\": {\n        \"x\""));
    }

    #[test]
    fn policy_round_trip() {
        let m = running_example();
        let fsc = find_policy(&m, &SolveOptions::default()).unwrap().policy.unwrap();
        let text = policy_to_json(&m, &fsc);
        let back = parse_policy(&m, &text).unwrap();
        assert_eq!(back, fsc);
        assert_eq!(policy_to_json(&m, &back), text);
    }

    #[test]
    fn policy_references_are_checked() {
        let m = running_example();
        let fsc = find_policy(&m, &SolveOptions::default()).unwrap().policy.unwrap();
        let mut file = policy_to_file(&m, &fsc);
        file.nodes[0].belief = vec![0, 7];
        assert!(matches!(policy_from_file(&m, &file), Err(FormatError::Policy(_))));
        let mut file = policy_to_file(&m, &fsc);
        file.nodes[0].belief.clear();
        assert!(policy_from_file(&m, &file).is_err());
        let mut file = policy_to_file(&m, &fsc);
        file.initial.insert("s0".into(), 999);
        assert!(policy_from_file(&m, &file).is_err());
    }

    proptest! {
        #[test]
        fn models_round_trip(seed in any::<u64>(), acyclic in any::<bool>()) {
            let m = gen_random(&RandomParams::new(seed, 7, 4, 3, acyclic));
            let text = model_to_json(&m);
            let back = parse_model(&text).unwrap();
            prop_assert_eq!(&back, &m);
            prop_assert_eq!(model_to_json(&back), text);
        }
    }
}
