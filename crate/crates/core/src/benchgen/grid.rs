//! Navigation around a hidden hole. Each environment places the hole in a
//! different cell; with sensing, the state reveals whether the hole is
//! adjacent.

use crate::error::GenError;
use crate::model::{Completion, Memdp, MemdpBuilder};

const MOVES: [(&str, i64, i64); 4] = [("north", 0, 1), ("east", 1, 0), ("south", 0, -1), ("west", -1, 0)];

/// A `width × height` grid from `(0,0)` to `(width-1, height-1)`. Holes may
/// lie in any cell at Manhattan distance at least 2 from the start, other
/// than the goal.
pub fn gen_grid(width: usize, height: usize, sensing: bool) -> Result<Memdp, GenError> {
    if width < 2 || height < 2 || width * height > 4096 {
        return Err(GenError::ParameterOutOfRange(format!(
            "grid {width}x{height} must be between 2x2 and 4096 cells"
        )));
    }
    let goal_cell = (width - 1, height - 1);
    let holes: Vec<(usize, usize)> = (0..height)
        .flat_map(|y| (0..width).map(move |x| (x, y)))
        .filter(|&(x, y)| x + y >= 2 && (x, y) != goal_cell)
        .collect();
    if holes.is_empty() {
        return Err(GenError::ParameterOutOfRange("no cell can hold the hole".into()));
    }
    let flags = if sensing { 2 } else { 1 };
    let cell_state = |x: usize, y: usize, d: usize| (y * width + x) * flags + d;
    let hole_state = width * height * flags;
    let goal_state = hole_state + 1;
    let mut names = Vec::with_capacity(goal_state + 1);
    for y in 0..height {
        for x in 0..width {
            for d in 0..flags {
                names.push(if d == 1 { format!("c{x}_{y}!") } else { format!("c{x}_{y}") });
            }
        }
    }
    names.push("hole".into());
    names.push("goal".into());
    let mut b = MemdpBuilder::new(names, MOVES.map(|m| m.0), holes.len());
    b.initial(&[(cell_state(0, 0, 0), 1.0)]).target(goal_state);
    for (env, &hole) in holes.iter().enumerate() {
        let danger = |x: usize, y: usize| {
            usize::from(sensing && x.abs_diff(hole.0) + y.abs_diff(hole.1) == 1)
        };
        for y in 0..height {
            for x in 0..width {
                if (x, y) == goal_cell || (x, y) == hole {
                    continue;
                }
                for (a, &(_, dx, dy)) in MOVES.iter().enumerate() {
                    let nx = (x as i64 + dx).clamp(0, width as i64 - 1) as usize;
                    let ny = (y as i64 + dy).clamp(0, height as i64 - 1) as usize;
                    let to = if (nx, ny) == hole {
                        hole_state
                    } else if (nx, ny) == goal_cell {
                        goal_state
                    } else {
                        cell_state(nx, ny, danger(nx, ny))
                    };
                    for d in 0..flags {
                        b.set(env, cell_state(x, y, d), a, &[(to, 1.0)]);
                    }
                }
            }
        }
    }
    Ok(b.build(Completion::SelfLoop)?)
}
