//! Guessing a hidden code of `pegs` positions over `colors` colors. Each
//! environment fixes the code; feedback is the number of exact matches.

use crate::error::GenError;
use crate::model::{Completion, Memdp, MemdpBuilder};

/// States are `start`, `r{round}f{feedback}` for the rounds before the last,
/// and the absorbing `win` and `lose`. Guessing wrong `guesses` times loses.
pub fn gen_mastermind(pegs: usize, colors: usize, guesses: usize) -> Result<Memdp, GenError> {
    if pegs == 0 || colors < 2 || guesses == 0 {
        return Err(GenError::ParameterOutOfRange(
            "need at least one peg, two colors and one guess".into(),
        ));
    }
    let codes = (colors as u64)
        .checked_pow(pegs as u32)
        .filter(|&c| c <= 1024)
        .ok_or_else(|| GenError::ParameterOutOfRange("more than 1024 codes".into()))? as usize;
    let digits = |mut c: usize| {
        let mut d = vec![0; pegs];
        for slot in d.iter_mut() {
            *slot = c % colors;
            c /= colors;
        }
        d
    };
    let start = 0;
    let round = |r: usize, f: usize| 1 + (r - 1) * pegs + f;
    let win = 1 + (guesses - 1) * pegs;
    let lose = win + 1;
    let mut states = vec!["start".to_string()];
    for r in 1..guesses {
        states.extend((0..pegs).map(|f| format!("r{r}f{f}")));
    }
    states.push("win".into());
    states.push("lose".into());
    let actions: Vec<String> = (0..codes)
        .map(|c| digits(c).iter().map(|d| d.to_string()).collect())
        .collect();
    let mut b = MemdpBuilder::new(states, actions, codes);
    b.initial(&[(start, 1.0)]).target(win);
    for code in 0..codes {
        let secret = digits(code);
        for guess in 0..codes {
            let matches = digits(guess)
                .iter()
                .zip(&secret)
                .filter(|(a, b)| a == b)
                .count();
            for r in 0..guesses {
                let from = if r == 0 { start } else { round(r, 0) };
                let to = if matches == pegs {
                    win
                } else if r + 1 == guesses {
                    lose
                } else {
                    round(r + 1, matches)
                };
                let sources: Vec<usize> = if r == 0 {
                    vec![from]
                } else {
                    (0..pegs).map(|f| round(r, f)).collect()
                };
                for s in sources {
                    b.set(code, s, guess, &[(to, 1.0)]);
                }
            }
        }
    }
    Ok(b.build(Completion::SelfLoop)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::is_acyclic;
    use crate::reference::as_winning_recursive;

    #[test]
    fn sizes() {
        let m = gen_mastermind(4, 2, 5).unwrap();
        assert_eq!((m.num_envs(), m.num_actions()), (16, 16));
        assert_eq!(m.num_states(), 1 + 4 * 4 + 2);
        assert!(is_acyclic(&m));
        assert!(gen_mastermind(0, 2, 1).is_err());
    }

    #[test]
    fn one_peg_needs_one_guess_per_color() {
        assert!(as_winning_recursive(&gen_mastermind(1, 3, 3).unwrap()));
        assert!(!as_winning_recursive(&gen_mastermind(1, 3, 2).unwrap()));
    }
}
