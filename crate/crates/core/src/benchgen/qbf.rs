//! Quantified Boolean formulas and their reduction to MEMDPs.
//!
//! One environment per clause. The policy picks a value for each existential
//! variable, nature flips a fair coin for each universal one, and the play
//! reaches the target in environment `c` iff the assignment satisfies clause
//! `c`. The formula is true iff the MEMDP is satisfiable.

use crate::error::GenError;
use crate::model::{Completion, Memdp, MemdpBuilder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// Prenex CNF over variables `1..=num_vars`. Literals are signed variable
/// indices. Variables missing from the prefix are existential and outermost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QbfFormula {
    pub num_vars: usize,
    pub prefix: Vec<(Quantifier, usize)>,
    pub clauses: Vec<Vec<i32>>,
}

impl QbfFormula {
    /// The prefix with free variables prepended as existentials.
    pub fn closed_prefix(&self) -> Vec<(Quantifier, usize)> {
        let bound: BTreeSet<usize> = self.prefix.iter().map(|&(_, v)| v).collect();
        let mut out: Vec<(Quantifier, usize)> = (1..=self.num_vars)
            .filter(|v| !bound.contains(v))
            .map(|v| (Quantifier::Exists, v))
            .collect();
        out.extend(self.prefix.iter().copied());
        out
    }

    fn validate(&self) -> Result<(), GenError> {
        let mut seen = BTreeSet::new();
        for &(_, v) in &self.prefix {
            if v == 0 || v > self.num_vars {
                return Err(GenError::MalformedFormula(format!("variable {v} out of range")));
            }
            if !seen.insert(v) {
                return Err(GenError::MalformedFormula(format!("variable {v} quantified twice")));
            }
        }
        for c in &self.clauses {
            for &l in c {
                let v = l.unsigned_abs() as usize;
                if l == 0 || v > self.num_vars {
                    return Err(GenError::MalformedFormula(format!("literal {l} out of range")));
                }
            }
        }
        Ok(())
    }
}

/// Truth value by recursion over the prefix.
pub fn qbf_eval(f: &QbfFormula) -> Result<bool, GenError> {
    f.validate()?;
    let prefix = f.closed_prefix();
    let mut assignment = vec![false; f.num_vars + 1];
    Ok(eval_rec(f, &prefix, &mut assignment))
}

fn eval_rec(f: &QbfFormula, prefix: &[(Quantifier, usize)], asg: &mut Vec<bool>) -> bool {
    let Some((&(q, v), rest)) = prefix.split_first() else {
        return f.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| asg[l.unsigned_abs() as usize] == (l > 0))
        });
    };
    let mut branch = |val| {
        asg[v] = val;
        eval_rec(f, rest, asg)
    };
    match q {
        Quantifier::Exists => branch(false) || branch(true),
        Quantifier::Forall => branch(false) && branch(true),
    }
}

/// Parses the QDIMACS format: a `p cnf V C` header, quantifier lines
/// starting with `e` or `a`, and zero-terminated clauses.
pub fn parse_qdimacs(text: &str) -> Result<QbfFormula, GenError> {
    let bad = |line: usize, msg: &str| GenError::MalformedFormula(format!("line {line}: {msg}"));
    let mut header: Option<(usize, usize)> = None;
    let mut prefix = Vec::new();
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let first = toks.next().unwrap();
        if first == "p" {
            if header.is_some() {
                return Err(bad(lineno, "duplicate header"));
            }
            let rest: Vec<&str> = toks.collect();
            if rest.len() != 3 || rest[0] != "cnf" {
                return Err(bad(lineno, "expected `p cnf <vars> <clauses>`"));
            }
            let v = rest[1].parse().map_err(|_| bad(lineno, "bad variable count"))?;
            let c = rest[2].parse().map_err(|_| bad(lineno, "bad clause count"))?;
            header = Some((v, c));
            continue;
        }
        if header.is_none() {
            return Err(bad(lineno, "missing `p cnf` header"));
        }
        let quant = match first {
            "e" => Some(Quantifier::Exists),
            "a" => Some(Quantifier::Forall),
            _ => None,
        };
        let nums: Result<Vec<i32>, _> = match quant {
            Some(_) => toks.map(str::parse).collect(),
            None => line.split_whitespace().map(str::parse).collect(),
        };
        let nums = nums.map_err(|_| bad(lineno, "expected integers"))?;
        if let Some(q) = quant {
            if !clauses.is_empty() || !current.is_empty() {
                return Err(bad(lineno, "quantifier after clauses"));
            }
            if nums.last() != Some(&0) {
                return Err(bad(lineno, "quantifier line must end with 0"));
            }
            for &v in &nums[..nums.len() - 1] {
                if v <= 0 {
                    return Err(bad(lineno, "quantified variables must be positive"));
                }
                prefix.push((q, v as usize));
            }
        } else {
            for l in nums {
                if l == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(l);
                }
            }
        }
    }
    if !current.is_empty() {
        return Err(GenError::MalformedFormula("unterminated clause".into()));
    }
    let (num_vars, num_clauses) =
        header.ok_or_else(|| GenError::MalformedFormula("missing `p cnf` header".into()))?;
    if clauses.len() != num_clauses {
        return Err(GenError::MalformedFormula(format!(
            "header declares {num_clauses} clauses, found {}",
            clauses.len()
        )));
    }
    let f = QbfFormula {
        num_vars,
        prefix,
        clauses,
    };
    f.validate()?;
    Ok(f)
}

/// A small random formula with 1 to `max_vars` variables in at most
/// `max_blocks` alternating quantifier blocks, and 1 to `max_clauses` clauses
/// of width at most 3.
pub fn random_qbf(seed: u64, max_blocks: usize, max_vars: usize, max_clauses: usize) -> QbfFormula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_vars = rng.gen_range(1..=max_vars.max(1));
    let blocks = rng.gen_range(1..=max_blocks.clamp(1, num_vars));
    // Block boundaries: `blocks - 1` distinct cut points in 1..num_vars.
    let mut cuts: Vec<usize> = (1..num_vars).collect();
    for i in (1..cuts.len()).rev() {
        cuts.swap(i, rng.gen_range(0..=i));
    }
    cuts.truncate(blocks - 1);
    cuts.sort_unstable();
    let mut q = if rng.gen_bool(0.5) {
        Quantifier::Exists
    } else {
        Quantifier::Forall
    };
    let mut prefix = Vec::with_capacity(num_vars);
    for v in 1..=num_vars {
        if cuts.binary_search(&(v - 1)).is_ok() {
            q = match q {
                Quantifier::Exists => Quantifier::Forall,
                Quantifier::Forall => Quantifier::Exists,
            };
        }
        prefix.push((q, v));
    }
    let num_clauses = rng.gen_range(1..=max_clauses.max(1));
    let clauses = (0..num_clauses)
        .map(|_| {
            let width = rng.gen_range(1..=3.min(num_vars));
            let mut c: Vec<i32> = Vec::new();
            while c.len() < width {
                let v = rng.gen_range(1..=num_vars) as i32;
                if c.iter().all(|l| l.abs() != v) {
                    c.push(if rng.gen_bool(0.5) { v } else { -v });
                }
            }
            c
        })
        .collect();
    QbfFormula {
        num_vars,
        prefix,
        clauses,
    }
}

/// Pads the closed prefix to strict alternation `∃x1 ∀y1 ∃x2 ∀y2 …`.
/// Returns `(x_i, y_i)` pairs where `None` marks a dummy variable.
fn alternate(prefix: &[(Quantifier, usize)]) -> Vec<(Option<usize>, Option<usize>)> {
    let mut pairs: Vec<(Option<usize>, Option<usize>)> = Vec::new();
    let mut pending_x: Option<Option<usize>> = None;
    for &(q, v) in prefix {
        match q {
            Quantifier::Exists => {
                if let Some(x) = pending_x.take() {
                    pairs.push((x, None));
                }
                pending_x = Some(Some(v));
            }
            Quantifier::Forall => {
                let x = pending_x.take().unwrap_or(None);
                pairs.push((x, Some(v)));
            }
        }
    }
    if let Some(x) = pending_x {
        pairs.push((x, None));
    }
    if pairs.is_empty() {
        pairs.push((None, None));
    }
    pairs
}

/// The MEMDP encoding of `f`. States are `x_i, x_iT, x_iF, y_i, y_iT, y_iF`
/// per padded position, a sink `x_{n+1}` and the target `W`.
pub fn gen_qbf(f: &QbfFormula) -> Result<Memdp, GenError> {
    f.validate()?;
    if f.clauses.is_empty() {
        return Err(GenError::MalformedFormula("formula has no clauses".into()));
    }
    let pairs = alternate(&f.closed_prefix());
    let n = pairs.len();
    // Layout: W, then six states per position, then the sink.
    let win = 0;
    let base = |i: usize| 1 + 6 * i;
    let (x, xt, xf, y, yt, yf) = (0, 1, 2, 3, 4, 5);
    let sink = 1 + 6 * n;
    let mut states = vec!["W".to_string()];
    for i in 1..=n {
        for suffix in ["", "T", "F"] {
            states.push(format!("x{i}{suffix}"));
        }
        for suffix in ["", "T", "F"] {
            states.push(format!("y{i}{suffix}"));
        }
    }
    states.push(format!("x{}", n + 1));
    let (top, bot, any) = (0, 1, 2);
    let num_states = states.len();
    let mut b = MemdpBuilder::new(states, ["T", "F", "any"], f.clauses.len());
    b.initial(&[(base(0) + x, 1.0)]).target(win);
    for (c, clause) in f.clauses.iter().enumerate() {
        let satisfies = |var: Option<usize>, val: bool| {
            var.is_some_and(|v| {
                let lit = if val { v as i32 } else { -(v as i32) };
                clause.contains(&lit)
            })
        };
        for (i, &(xv, yv)) in pairs.iter().enumerate() {
            let p = base(i);
            let next_x = if i + 1 < n { base(i + 1) + x } else { sink };
            b.set(c, p + x, top, &[(p + xt, 1.0)]);
            b.set(c, p + x, bot, &[(p + xf, 1.0)]);
            b.set(c, p + y, any, &[(p + yt, 0.5), (p + yf, 0.5)]);
            for (state, var, val, next) in [
                (p + xt, xv, true, p + y),
                (p + xf, xv, false, p + y),
                (p + yt, yv, true, next_x),
                (p + yf, yv, false, next_x),
            ] {
                let to = if satisfies(var, val) { win } else { next };
                b.set(c, state, any, &[(to, 1.0)]);
            }
        }
        for s in 0..num_states {
            if s == win || s == sink {
                continue;
            }
            for a in [top, bot, any] {
                if !b.is_set(c, s, a) {
                    b.set(c, s, a, &[(sink, 1.0)]);
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
    use crate::reference::brute_force_decide;
    use proptest::prelude::*;

    /// Truth value by tabulating the matrix over all assignments and folding
    /// the quantifiers from the innermost outwards.
    fn eval_by_table(f: &QbfFormula) -> bool {
        let prefix = f.closed_prefix();
        let n = prefix.len();
        let mut layer: Vec<bool> = (0..1usize << n)
            .map(|bits| {
                let val = |var: usize| {
                    let pos = prefix.iter().position(|&(_, v)| v == var).unwrap();
                    bits >> pos & 1 == 1
                };
                f.clauses
                    .iter()
                    .all(|c| c.iter().any(|&l| val(l.unsigned_abs() as usize) == (l > 0)))
            })
            .collect();
        for k in (0..n).rev() {
            let half = 1usize << k;
            layer = (0..half)
                .map(|lo| {
                    let (a, b) = (layer[lo], layer[lo | half]);
                    match prefix[k].0 {
                        Quantifier::Exists => a || b,
                        Quantifier::Forall => a && b,
                    }
                })
                .collect();
        }
        layer[0]
    }

    #[test]
    fn small_example() {
        // ∀x ∃y. (x ∨ y) ∧ (¬x ∨ ¬y)
        let f = parse_qdimacs("p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n").unwrap();
        assert!(qbf_eval(&f).unwrap());
        let m = gen_qbf(&f).unwrap();
        assert_eq!(m.num_envs(), 2);
        assert_eq!(m.num_states(), 2 + 6 * 2);
        assert!(is_acyclic(&m));
        assert!(brute_force_decide(&m, 1_000_000).unwrap());
        // ∃y ∀x flips the truth value.
        let g = parse_qdimacs("p cnf 2 2\ne 2 0\na 1 0\n1 2 0\n-1 -2 0\n").unwrap();
        assert!(!qbf_eval(&g).unwrap());
        assert!(!brute_force_decide(&gen_qbf(&g).unwrap(), 1_000_000).unwrap());
    }

    #[test]
    fn parse_errors() {
        for bad in [
            "1 2 0\n",
            "p cnf 2 1\n1 3 0\n",
            "p cnf 2 2\n1 2 0\n",
            "p cnf 2 1\n1 2\n",
            "p cnf 2 1\n1 0\ne 2 0\n",
            "p cnf 2 1\ne 1 0\na 1 0\n1 0\n",
            "p cnf x 1\n",
        ] {
            assert!(parse_qdimacs(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn random_formulas_respect_block_limit() {
        for seed in 0..200 {
            let f = random_qbf(seed, 3, 6, 4);
            let alternations = f.prefix.windows(2).filter(|w| w[0].0 != w[1].0).count();
            assert!(alternations < 3 && f.num_vars <= 6 && f.clauses.len() <= 4);
            assert_eq!(f.prefix.len(), f.num_vars);
        }
    }

    #[test]
    fn padding() {
        use Quantifier::*;
        assert_eq!(
            alternate(&[(Forall, 1), (Exists, 2), (Exists, 3)]),
            vec![(None, Some(1)), (Some(2), None), (Some(3), None)]
        );
        assert_eq!(alternate(&[(Exists, 1), (Forall, 2)]), vec![(Some(1), Some(2))]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn recursion_matches_table(seed in any::<u64>()) {
            let f = random_qbf(seed, 4, 6, 6);
            prop_assert_eq!(qbf_eval(&f).unwrap(), eval_by_table(&f));
        }

        #[test]
        fn reduction_preserves_truth(seed in any::<u64>()) {
            let f = random_qbf(seed, 3, 4, 4);
            let m = gen_qbf(&f).unwrap();
            prop_assert_eq!(brute_force_decide(&m, 5_000_000).unwrap(), eval_by_table(&f));
        }
    }
}
