//! Exact dynamics of the walk and directed-edge local-time bookkeeping.
//!
//! `l+(k, x)` (resp. `l-(k, x)`) counts the steps `j < k` with `X(j) = x`
//! and `X(j + 1) = x + 1` (resp. `x - 1`). The right-step probability at
//! time `k` only depends on `d = l+(k, X(k)) - l-(k, X(k))`.

mod eta;
mod local_time;
mod walker;

pub use eta::{extract_eta_sequence, EtaSequence, EtaTransitionTally};
pub use local_time::{LocalTimeTable, RangeBound};
pub use walker::{simulate_until_inverse_local_time, InverseLocalTimeRun, Walker};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::replica_rng;
use crate::weight::WeightFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Direction {
    pub fn step(self) -> i64 {
        match self {
            Self::Plus => 1,
            Self::Minus => -1,
        }
    }
}

/// A realised path `X(0) = 0, X(1), ..., X(k)` with its final local times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    positions: Vec<i64>,
    local_times: LocalTimeTable,
}

impl Trajectory {
    /// Builds a trajectory from its `+1/-1` increments.
    pub fn from_steps(steps: &[Direction]) -> Self {
        let mut positions = Vec::with_capacity(steps.len() + 1);
        let mut x = 0i64;
        positions.push(x);
        let mut table = LocalTimeTable::default();
        for s in steps {
            table.record(x, *s);
            x += s.step();
            positions.push(x);
        }
        Self { positions, local_times: table }
    }

    pub fn len(&self) -> usize {
        self.positions.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    pub fn endpoint(&self) -> i64 {
        *self.positions.last().expect("trajectory always holds X(0)")
    }

    pub fn steps(&self) -> impl Iterator<Item = Direction> + '_ {
        self.positions.windows(2).map(|p| if p[1] > p[0] { Direction::Plus } else { Direction::Minus })
    }

    /// Local times at the final time.
    pub fn local_times(&self) -> &LocalTimeTable {
        &self.local_times
    }

    /// Local times `l+/-(k, .)` after the first `k` steps.
    pub fn local_times_at(&self, k: usize) -> LocalTimeTable {
        assert!(k <= self.len(), "time {k} beyond trajectory of length {}", self.len());
        let mut table = LocalTimeTable::default();
        for (j, dir) in self.steps().take(k).enumerate() {
            table.record(self.positions[j], dir);
        }
        table
    }
}

/// Simulates `steps` steps of the walk driven by `w`, deterministically in
/// `seed`.
pub fn simulate_walk(w: &WeightFunction, steps: usize, seed: u64) -> Result<Trajectory> {
    let mut rng = replica_rng(seed, 0);
    simulate_walk_with(w, steps, &mut rng)
}

pub fn simulate_walk_with<R: RngCore>(w: &WeightFunction, steps: usize, rng: &mut R) -> Result<Trajectory> {
    let mut walker = Walker::new(w)?;
    let mut dirs = Vec::with_capacity(steps);
    for _ in 0..steps {
        dirs.push(walker.step(rng)?);
    }
    Ok(Trajectory::from_steps(&dirs))
}

/// `T^dir_{x,m} = min{k : l^dir(k, x) = m}` if reached within `t`.
pub fn inverse_local_time(t: &Trajectory, x: i64, m: u64, dir: Direction) -> Option<usize> {
    if m == 0 {
        return Some(0);
    }
    let mut count = 0u64;
    for (j, step) in t.steps().enumerate() {
        if t.positions[j] == x && step == dir {
            count += 1;
            if count == m {
                return Some(j + 1);
            }
        }
    }
    None
}

/// `(rho, lambda)` at time `time`: the largest site with `l+ > 0` and the
/// smallest with `l- > 0`, or the sentinels of the empty sup/inf.
pub fn range_extremes(t: &Trajectory, time: usize) -> (RangeBound, RangeBound) {
    let table = t.local_times_at(time);
    (table.rho(), table.lambda())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Direction::{Minus as M, Plus as P};

    #[test]
    fn inverse_local_time_examples() {
        let t = Trajectory::from_steps(&[P, M, M]);
        assert_eq!(inverse_local_time(&t, 0, 0, P), Some(0));
        assert_eq!(inverse_local_time(&t, 0, 1, P), Some(1));
        let t = Trajectory::from_steps(&[M, P, P]);
        assert_eq!(inverse_local_time(&t, 0, 1, P), Some(3));
        assert_eq!(inverse_local_time(&t, 0, 2, P), None);
        assert_eq!(inverse_local_time(&t, -1, 1, P), Some(2));
    }

    #[test]
    fn range_extreme_examples() {
        let t = Trajectory::from_steps(&[P, M]);
        // 1 -> 0 is a left crossing out of site 1.
        assert_eq!(range_extremes(&t, 2), (RangeBound::Site(0), RangeBound::Site(1)));
        assert_eq!(range_extremes(&t, 1), (RangeBound::Site(0), RangeBound::PosInfinity));
        let t = Trajectory::from_steps(&[M, P]);
        assert_eq!(range_extremes(&t, 2), (RangeBound::Site(-1), RangeBound::Site(0)));
        assert_eq!(range_extremes(&t, 0), (RangeBound::NegInfinity, RangeBound::PosInfinity));
    }

    #[test]
    fn zero_steps_is_empty() {
        let w = WeightFunction::exponential(1.0).unwrap();
        let t = simulate_walk(&w, 0, 1).unwrap();
        assert!(t.is_empty());
        assert_eq!(t.endpoint(), 0);
        assert_eq!(t.local_times().total(), 0);
    }

    #[test]
    fn seeded_simulation_is_deterministic() {
        let w = WeightFunction::linear_ramp(1.0, 1.0).unwrap();
        let a = simulate_walk(&w, 500, 42).unwrap();
        let b = simulate_walk(&w, 500, 42).unwrap();
        let c = simulate_walk(&w, 500, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.positions(), c.positions());
    }

    #[test]
    fn local_times_match_count_definition() {
        let w = WeightFunction::exponential(0.5).unwrap();
        let t = simulate_walk(&w, 2_000, 9).unwrap();
        for k in [0usize, 1, 17, 999, 2_000] {
            let table = t.local_times_at(k);
            assert_eq!(table.total(), k as u64);
            for x in -60..=60 {
                let plus = (0..k).filter(|&j| t.positions()[j] == x && t.positions()[j + 1] == x + 1).count();
                let minus = (0..k).filter(|&j| t.positions()[j] == x && t.positions()[j + 1] == x - 1).count();
                assert_eq!(table.get(x), (plus as u64, minus as u64), "k={k} x={x}");
            }
        }
    }

    #[test]
    fn inverse_time_decomposition() {
        // T+_{x,m} = 2 * sum_y l+(T, y) + |x| - 1 for x <= 0: the walk
        // stands at x + 1 at that time.
        let w = WeightFunction::exponential(1.0).unwrap();
        let t = simulate_walk(&w, 20_000, 5).unwrap();
        let mut checked = 0;
        for x in -12..=0i64 {
            for m in 1..=6u64 {
                if let Some(time) = inverse_local_time(&t, x, m, Direction::Plus) {
                    let table = t.local_times_at(time);
                    assert_eq!(time as u64, 2 * table.total_plus() + x.unsigned_abs() - 1);
                    assert_eq!(t.positions()[time], x + 1);
                    checked += 1;
                }
            }
        }
        assert!(checked > 40);
    }
}
