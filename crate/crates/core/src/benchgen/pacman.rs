//! An agent and a ghost on a grid. The ghost answers every agent move with a
//! direction fixed by the environment, giving `4^4` environments.

use crate::error::GenError;
use crate::model::{Completion, Memdp, MemdpBuilder};

const MOVES: [(&str, i64, i64); 4] = [("north", 0, 1), ("east", 1, 0), ("south", 0, -1), ("west", -1, 0)];
const ENVS: usize = 256;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    /// Reach the far corner without meeting the ghost.
    Escape,
    /// Meet the ghost.
    Catch,
}

/// Agent from `(0,0)` to `(width-1, height-1)`; the ghost starts at
/// `(0, height-1)`. Meeting the ghost loses.
pub fn gen_pacman(width: usize, height: usize) -> Result<Memdp, GenError> {
    build(width, height, Goal::Escape)
}

/// Same arena, but meeting the ghost is the objective.
pub fn gen_catchman(width: usize, height: usize) -> Result<Memdp, GenError> {
    build(width, height, Goal::Catch)
}

fn build(width: usize, height: usize, goal: Goal) -> Result<Memdp, GenError> {
    if width < 2 || height < 2 || width * height > 400 {
        return Err(GenError::ParameterOutOfRange(format!(
            "arena {width}x{height} must be between 2x2 and 400 cells"
        )));
    }
    let cells = width * height;
    let cell = |x: usize, y: usize| y * width + x;
    let step = |c: usize, d: usize| {
        let (x, y) = ((c % width) as i64, (c / width) as i64);
        let nx = (x + MOVES[d].1).clamp(0, width as i64 - 1) as usize;
        let ny = (y + MOVES[d].2).clamp(0, height as i64 - 1) as usize;
        cell(nx, ny)
    };
    let state = |agent: usize, ghost: usize| agent * cells + ghost;
    let corner = cell(width - 1, height - 1);
    let names: Vec<String> = (0..cells * cells)
        .map(|s| {
            let (a, g) = (s / cells, s % cells);
            format!("a{}_{}g{}_{}", a % width, a / width, g % width, g / width)
        })
        .collect();
    let mut b = MemdpBuilder::new(names, MOVES.map(|m| m.0), ENVS);
    b.initial(&[(state(cell(0, 0), cell(0, height - 1)), 1.0)]);
    let terminal = |a: usize, g: usize| match goal {
        Goal::Escape => a == g || a == corner,
        Goal::Catch => a == g,
    };
    for a in 0..cells {
        for g in 0..cells {
            let won = match goal {
                Goal::Escape => a == corner && a != g,
                Goal::Catch => a == g,
            };
            if won {
                b.target(state(a, g));
            }
        }
    }
    for env in 0..ENVS {
        let answer = |d: usize| (env >> (2 * d)) & 3;
        for a in 0..cells {
            for g in 0..cells {
                if terminal(a, g) {
                    continue;
                }
                for d in 0..4 {
                    let to = state(step(a, d), step(g, answer(d)));
                    b.set(env, state(a, g), d, &[(to, 1.0)]);
                }
            }
        }
    }
    Ok(b.build(Completion::SelfLoop)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let m = gen_catchman(5, 5).unwrap();
        assert_eq!((m.num_envs(), m.num_states(), m.num_actions()), (256, 625, 4));
        assert_eq!(m.targets().count(), 25);
        let p = gen_pacman(3, 3).unwrap();
        assert_eq!(p.num_states(), 81);
        assert_eq!(p.targets().count(), 8);
        assert!(gen_pacman(1, 3).is_err());
    }

    #[test]
    fn ghost_follows_the_environment() {
        let m = gen_pacman(3, 3).unwrap();
        let s = m.initial_states().next().unwrap();
        let east = m.action_index("east").unwrap();
        // Environment 0 answers every move with north; the ghost is at the
        // top wall and stays.
        let t = m.transition(0, s, east).support().next().unwrap();
        assert_eq!(m.state_name(t), "a1_0g0_2");
        // Environment with east answered by east moves the ghost right.
        let t = m.transition(1 << 2, s, east).support().next().unwrap();
        assert_eq!(m.state_name(t), "a1_0g1_2");
    }
}
