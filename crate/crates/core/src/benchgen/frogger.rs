//! Crossing a road with a car sweeping back and forth. The car's phase at
//! time zero is unknown; each environment fixes one phase.

use crate::error::GenError;
use crate::model::{Completion, Memdp, MemdpBuilder};

const MOVES: [(&str, i64, i64); 4] = [("up", 0, 1), ("right", 1, 0), ("down", 0, -1), ("left", -1, 0)];

/// The road is the middle row of a `width × height` grid. The car covers
/// `car_width` cells and bounces between the borders, so its motion has
/// period `2·(width - car_width)`. Environment `k` starts the car at phase
/// `k`, for `k < phases`. Reaching the top row wins, meeting the car loses.
pub fn gen_frogger(width: usize, height: usize, car_width: usize, phases: usize) -> Result<Memdp, GenError> {
    if height < 3 || width < 2 || car_width == 0 || car_width > width {
        return Err(GenError::ParameterOutOfRange(format!(
            "need height >= 3 and 1 <= car width <= width, got {width}x{height} with car {car_width}"
        )));
    }
    let span = width - car_width;
    let period = (2 * span).max(1);
    if phases == 0 || phases > period {
        return Err(GenError::ParameterOutOfRange(format!(
            "phases must be between 1 and the period {period}"
        )));
    }
    if width * height * period > 200_000 {
        return Err(GenError::ParameterOutOfRange("frogger instance too large".into()));
    }
    let road = height / 2;
    let car_left = |t: usize| {
        let t = t % period;
        if t <= span { t } else { period - t }
    };
    let state = |x: usize, y: usize, t: usize| (t * height + y) * width + x;
    let crash = width * height * period;
    let goal = crash + 1;
    let mut names = Vec::with_capacity(goal + 1);
    for t in 0..period {
        for y in 0..height {
            for x in 0..width {
                names.push(format!("p{x}_{y}@{t}"));
            }
        }
    }
    names.push("crash".into());
    names.push("goal".into());
    let mut b = MemdpBuilder::new(names, MOVES.map(|m| m.0), phases);
    b.initial(&[(state(0, 0, 0), 1.0)]).target(goal);
    for k in 0..phases {
        for t in 0..period {
            let nt = (t + 1) % period;
            let left = car_left(nt + k);
            for y in 0..height - 1 {
                for x in 0..width {
                    for (a, &(_, dx, dy)) in MOVES.iter().enumerate() {
                        let nx = (x as i64 + dx).clamp(0, width as i64 - 1) as usize;
                        let ny = (y as i64 + dy).clamp(0, height as i64 - 1) as usize;
                        let to = if ny == road && (left..left + car_width).contains(&nx) {
                            crash
                        } else if ny == height - 1 {
                            goal
                        } else {
                            state(nx, ny, nt)
                        };
                        b.set(k, state(x, y, t), a, &[(to, 1.0)]);
                    }
                }
            }
        }
    }
    Ok(b.build(Completion::SelfLoop)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::as_winning_recursive;

    #[test]
    fn narrow_car_can_be_dodged() {
        let m = gen_frogger(5, 3, 1, 4).unwrap();
        assert_eq!(m.num_envs(), 4);
        assert_eq!(m.num_states(), 5 * 3 * 8 + 2);
        assert!(as_winning_recursive(&m));
    }

    #[test]
    fn wide_car_blocks_the_road() {
        assert!(!as_winning_recursive(&gen_frogger(5, 3, 3, 4).unwrap()));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gen_frogger(5, 2, 1, 1).is_err());
        assert!(gen_frogger(5, 3, 6, 1).is_err());
        assert!(gen_frogger(5, 3, 1, 9).is_err());
    }
}
