//! Generated benchmark families against the reference algorithms.

use memdp_core::benchgen::*;
use memdp_core::mdp::is_acyclic;
use memdp_core::reference::{as_winning_recursive, verify_policy};
use memdp_core::bomdp::DEFAULT_STATE_CAP;
use memdp_core::{find_policy, Bomdp, Heuristic, Memdp, SolveOptions, Verdict};

fn solve_all(m: &Memdp) -> bool {
    let verdicts: Vec<bool> = Heuristic::ALL
        .into_iter()
        .map(|heuristic| {
            let out = find_policy(m, &SolveOptions { heuristic, ..SolveOptions::default() }).unwrap();
            if let Some(fsc) = &out.policy {
                assert!(verify_policy(m, fsc).unwrap().all_pass());
            }
            out.verdict == Verdict::Satisfiable
        })
        .collect();
    assert!(verdicts.iter().all(|&v| v == verdicts[0]), "{verdicts:?}");
    verdicts[0]
}

#[test]
fn small_instances_match_recursive_search() {
    let cases: Vec<(&str, Memdp)> = vec![
        ("grid 3x3", gen_grid(3, 3, true).unwrap()),
        ("grid 4x4", gen_grid(4, 4, true).unwrap()),
        ("grid 3x3 blind", gen_grid(3, 3, false).unwrap()),
        ("frogger", gen_frogger(5, 3, 1, 4).unwrap()),
        ("frogger wide", gen_frogger(5, 3, 3, 4).unwrap()),
        ("mastermind 2,2,3", gen_mastermind(2, 2, 3).unwrap()),
        ("mastermind 2,2,2", gen_mastermind(2, 2, 2).unwrap()),
        ("infinite belief", gen_infinite_belief()),
        ("running example", running_example()),
    ];
    for (name, m) in &cases {
        assert_eq!(solve_all(m), as_winning_recursive(m), "{name}");
    }
}

/// The recursive search walks every environment subset; with 256
/// environments the explicit belief-observation MDP is the practical oracle.
#[test]
fn ghost_games_match_explicit_bomdp() {
    for (name, m) in [("catchman 3x3", gen_catchman(3, 3).unwrap()), ("pacman 3x3", gen_pacman(3, 3).unwrap())] {
        let b = Bomdp::build(&m, DEFAULT_STATE_CAP).unwrap();
        let win = b.win(&b.target_obs());
        let expected = b.initial().iter().all(|&z| win.contains(b.observation(z)));
        assert_eq!(solve_all(&m), expected, "{name}");
    }
}

#[test]
fn satisfiable_and_unsatisfiable_counterparts() {
    assert!(solve_all(&gen_frogger(6, 4, 1, 5).unwrap()));
    assert!(!solve_all(&gen_frogger(6, 4, 4, 4).unwrap()));
    assert!(solve_all(&gen_mastermind(3, 2, 4).unwrap()));
    assert!(!solve_all(&gen_mastermind(3, 2, 3).unwrap()));
    assert!(!solve_all(&gen_pacman(5, 5).unwrap()));
    assert!(solve_all(&gen_catchman(3, 3).unwrap()));
}

#[test]
fn acyclicity_of_families() {
    assert!(is_acyclic(&gen_exponential(3).unwrap()));
    assert!(is_acyclic(&gen_mastermind(2, 3, 4).unwrap()));
    assert!(is_acyclic(&gen_qbf(&random_qbf(1, 3, 6, 4)).unwrap()));
    assert!(!is_acyclic(&gen_grid(3, 3, true).unwrap()));
    assert!(!is_acyclic(&running_example()));
}
