//! Embedded `eta` chains read off a path.
//!
//! Departures from a fixed site `x` form a sequence in which each step moves
//! `d = l+ - l-` by `+1` (right) or `-1` (left). `eta+` records `-d` right
//! after each right departure and `eta-` records `d` right after each left
//! departure, both starting from `0`.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{Direction, Trajectory, Walker};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaSequence {
    pub site: i64,
    pub direction: Direction,
    /// `eta_0 = 0, eta_1, ...`
    pub values: Vec<i64>,
    /// Departure counts at which each value was recorded (`tau_0 = 0`).
    pub times: Vec<u64>,
}

impl EtaSequence {
    pub fn new(site: i64, direction: Direction) -> Self {
        Self { site, direction, values: vec![0], times: vec![0] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[inline]
fn eta_value(direction: Direction, d: i64) -> i64 {
    match direction {
        Direction::Plus => -d,
        Direction::Minus => d,
    }
}

pub fn extract_eta_sequence(t: &Trajectory, x: i64, direction: Direction) -> EtaSequence {
    let mut seq = EtaSequence::new(x, direction);
    let mut d = 0i64;
    let mut departures = 0u64;
    for (j, step) in t.steps().enumerate() {
        if t.positions()[j] != x {
            continue;
        }
        departures += 1;
        d += step.step();
        if step == direction {
            seq.values.push(eta_value(direction, d));
            seq.times.push(departures);
        }
    }
    seq
}

/// Streaming counts of one-step `eta` transitions over all sites of many
/// walks, for source states in `[-max_state, max_state]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaTransitionTally {
    pub max_state: i64,
    /// Targets are tallied as `L = eta' - eta + 1` in `0..width`; larger jumps
    /// go to the overflow bin.
    pub width: usize,
    /// `counts[dir][state + max_state][L]`, `dir` 0 for `+`, 1 for `-`.
    pub counts: [Vec<Vec<u64>>; 2],
    pub overflow: [Vec<u64>; 2],
}

impl EtaTransitionTally {
    pub fn new(max_state: i64, width: usize) -> Self {
        let rows = (2 * max_state + 1) as usize;
        let grid = || vec![vec![0u64; width]; rows];
        Self { max_state, width, counts: [grid(), grid()], overflow: [vec![0; rows], vec![0; rows]] }
    }

    fn dir_index(direction: Direction) -> usize {
        match direction {
            Direction::Plus => 0,
            Direction::Minus => 1,
        }
    }

    pub fn record(&mut self, direction: Direction, from: i64, to: i64) {
        if from.abs() > self.max_state {
            return;
        }
        let dir = Self::dir_index(direction);
        let row = (from + self.max_state) as usize;
        let jump = to - from + 1;
        debug_assert!(jump >= 0, "eta can drop by at most one");
        if (jump as usize) < self.width {
            self.counts[dir][row][jump as usize] += 1;
        } else {
            self.overflow[dir][row] += 1;
        }
    }

    /// Number of transitions observed out of `state`.
    pub fn row_total(&self, direction: Direction, state: i64) -> u64 {
        let dir = Self::dir_index(direction);
        let row = (state + self.max_state) as usize;
        self.counts[dir][row].iter().sum::<u64>() + self.overflow[dir][row]
    }

    /// Observed counts out of `state` indexed by `L = eta' - state + 1`,
    /// followed by the overflow count.
    pub fn row(&self, direction: Direction, state: i64) -> (&[u64], u64) {
        let dir = Self::dir_index(direction);
        let row = (state + self.max_state) as usize;
        (&self.counts[dir][row], self.overflow[dir][row])
    }

    pub fn merge(&mut self, other: &Self) {
        assert_eq!((self.max_state, self.width), (other.max_state, other.width));
        for dir in 0..2 {
            for (a, b) in self.counts[dir].iter_mut().zip(&other.counts[dir]) {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
            }
            for (x, y) in self.overflow[dir].iter_mut().zip(&other.overflow[dir]) {
                *x += y;
            }
        }
    }

    /// Simulates `steps` steps of a fresh walk and tallies every `eta+` and
    /// `eta-` transition at every site.
    pub fn record_walk<R: RngCore>(&mut self, walker: &mut Walker, steps: u64, rng: &mut R) -> Result<()> {
        walker.reset();
        walker.reserve(steps);
        // Last recorded eta per site and direction; every chain starts at 0.
        let half = steps as i64 + 1;
        let mut last = [vec![0i64; (2 * half + 1) as usize], vec![0i64; (2 * half + 1) as usize]];
        for _ in 0..steps {
            let x = walker.position();
            let dir = walker.step(rng)?;
            let d = walker.drift(x);
            let slot = &mut last[Self::dir_index(dir)][(x + half) as usize];
            let to = eta_value(dir, d);
            self.record(dir, *slot, to);
            *slot = to;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replica_rng;
    use crate::walk::simulate_walk;
    use crate::weight::WeightFunction;
    use Direction::{Minus as M, Plus as P};

    #[test]
    fn first_right_departure() {
        let t = Trajectory::from_steps(&[P, M]);
        let eta = extract_eta_sequence(&t, 0, P);
        assert_eq!(eta.values, vec![0, -1]);
        assert_eq!(eta.times, vec![0, 1]);
    }

    #[test]
    fn first_left_departure() {
        let t = Trajectory::from_steps(&[M, P]);
        let eta = extract_eta_sequence(&t, 0, M);
        assert_eq!(eta.values, vec![0, -1]);
    }

    #[test]
    fn short_trajectory_gives_short_sequence() {
        let t = Trajectory::from_steps(&[]);
        assert_eq!(extract_eta_sequence(&t, 0, P).values, vec![0]);
    }

    #[test]
    fn extracted_sequences_respect_support() {
        let w = WeightFunction::linear_ramp(1.0, 1.0).unwrap();
        let t = simulate_walk(&w, 20_000, 3).unwrap();
        for x in -20..=20 {
            for dir in [P, M] {
                let eta = extract_eta_sequence(&t, x, dir);
                assert_eq!(eta.values[0], 0);
                assert!(eta.values.windows(2).all(|p| p[1] >= p[0] - 1));
                assert!(eta.times.windows(2).all(|p| p[1] > p[0]));
            }
        }
    }

    #[test]
    fn streaming_tally_agrees_with_extraction() {
        let w = WeightFunction::exponential(0.3).unwrap();
        let steps = 5_000u64;
        let t = crate::walk::simulate_walk_with(&w, steps as usize, &mut replica_rng(8, 0)).unwrap();
        let mut expected = EtaTransitionTally::new(4, 16);
        let (lo, hi) = t.local_times().site_range().unwrap();
        for x in lo..=hi {
            for dir in [P, M] {
                let eta = extract_eta_sequence(&t, x, dir);
                for pair in eta.values.windows(2) {
                    expected.record(dir, pair[0], pair[1]);
                }
            }
        }
        let mut streamed = EtaTransitionTally::new(4, 16);
        let mut walker = Walker::new(&w).unwrap();
        streamed.record_walk(&mut walker, steps, &mut replica_rng(8, 0)).unwrap();
        assert_eq!(streamed, expected);
    }
}
