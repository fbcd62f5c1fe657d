use rand::RngCore;

use super::{Direction, LocalTimeTable};
use crate::error::Result;
use crate::weight::{StepTable, WeightFunction};

/// Reusable simulation engine: local times live in flat arrays indexed by
/// `site + origin` and grow when the walk reaches an edge.
#[derive(Debug, Clone)]
pub struct Walker {
    table: StepTable,
    plus: Vec<u32>,
    minus: Vec<u32>,
    origin: i64,
    pos: i64,
    time: u64,
    lo: i64,
    hi: i64,
}

impl Walker {
    pub fn new(w: &WeightFunction) -> Result<Self> {
        Ok(Self::with_table(StepTable::new(w)?))
    }

    pub fn with_table(table: StepTable) -> Self {
        let half = 64;
        Self {
            table,
            plus: vec![0; 2 * half + 1],
            minus: vec![0; 2 * half + 1],
            origin: half as i64,
            pos: 0,
            time: 0,
            lo: 0,
            hi: 0,
        }
    }

    /// Returns the walk to `X(0) = 0` with zero local times, keeping buffers.
    pub fn reset(&mut self) {
        let a = (self.lo + self.origin) as usize;
        let b = (self.hi + self.origin) as usize;
        self.plus[a..=b].fill(0);
        self.minus[a..=b].fill(0);
        self.pos = 0;
        self.time = 0;
        self.lo = 0;
        self.hi = 0;
    }

    /// Pre-sizes buffers so that `steps` more steps never reallocate.
    pub fn reserve(&mut self, steps: u64) {
        let need = steps as i64 + self.pos.abs() + 2;
        if self.origin < need || (self.plus.len() as i64 - self.origin) <= need {
            self.regrow(need);
        }
    }

    fn regrow(&mut self, half: i64) {
        let half = half.max(2 * self.origin.max(self.plus.len() as i64 - self.origin));
        let len = (2 * half + 1) as usize;
        let mut plus = vec![0u32; len];
        let mut minus = vec![0u32; len];
        for x in self.lo..=self.hi {
            plus[(x + half) as usize] = self.plus[(x + self.origin) as usize];
            minus[(x + half) as usize] = self.minus[(x + self.origin) as usize];
        }
        self.plus = plus;
        self.minus = minus;
        self.origin = half;
    }

    #[inline]
    pub fn position(&self) -> i64 {
        self.pos
    }

    #[inline]
    pub fn time(&self) -> u64 {
        self.time
    }

    #[inline]
    fn index(&self, x: i64) -> Option<usize> {
        let i = x + self.origin;
        (i >= 0 && (i as usize) < self.plus.len()).then_some(i as usize)
    }

    #[inline]
    pub fn l_plus(&self, x: i64) -> u64 {
        self.index(x).map_or(0, |i| self.plus[i] as u64)
    }

    #[inline]
    pub fn l_minus(&self, x: i64) -> u64 {
        self.index(x).map_or(0, |i| self.minus[i] as u64)
    }

    /// `l+(x) - l-(x)` at the current time.
    #[inline]
    pub fn drift(&self, x: i64) -> i64 {
        self.l_plus(x) as i64 - self.l_minus(x) as i64
    }

    /// Sites touched so far (including the current position).
    pub fn visited(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    /// Advances one step and returns its direction.
    #[inline]
    pub fn step<R: RngCore>(&mut self, rng: &mut R) -> Result<Direction> {
        Ok(if self.advance(rng)? { Direction::Plus } else { Direction::Minus })
    }

    /// Branch-free core of [`step`](Self::step); `true` means a right step.
    #[inline(always)]
    fn advance<R: RngCore>(&mut self, rng: &mut R) -> Result<bool> {
        let mut i = (self.pos + self.origin) as usize;
        if i == 0 || i + 1 == self.plus.len() {
            self.regrow(2 * self.origin);
            i = (self.pos + self.origin) as usize;
        }
        let d = self.plus[i] as i64 - self.minus[i] as i64;
        let threshold = self.table.threshold(d)?;
        let right = rng.next_u64() < threshold;
        let r = right as u32;
        self.plus[i] += r;
        self.minus[i] += 1 - r;
        self.pos += 2 * r as i64 - 1;
        self.time += 1;
        self.hi = self.hi.max(self.pos);
        self.lo = self.lo.min(self.pos);
        Ok(right)
    }

    /// Runs `steps` steps and returns the final position.
    pub fn run<R: RngCore>(&mut self, rng: &mut R, steps: u64) -> Result<i64> {
        self.reserve(steps);
        for _ in 0..steps {
            self.advance(rng)?;
        }
        Ok(self.pos)
    }

    /// Snapshot of the current local times.
    pub fn local_times(&self) -> LocalTimeTable {
        let a = (self.lo + self.origin) as usize;
        let b = (self.hi + self.origin) as usize;
        LocalTimeTable::from_dense(
            self.lo,
            self.plus[a..=b].iter().map(|&v| v as u64).collect(),
            self.minus[a..=b].iter().map(|&v| v as u64).collect(),
        )
    }
}

/// Outcome of running a walk until `T+_{x,m}`.
#[derive(Debug, Clone, PartialEq)]
pub enum InverseLocalTimeRun {
    Reached { time: u64, local_times: LocalTimeTable },
    /// `max_steps` elapsed before `l+(x)` reached `m`.
    Censored,
}

/// Runs a fresh walk until the first time `l+(., x) = m`.
pub fn simulate_until_inverse_local_time<R: RngCore>(
    walker: &mut Walker,
    x: i64,
    m: u64,
    rng: &mut R,
    max_steps: u64,
) -> Result<InverseLocalTimeRun> {
    walker.reset();
    if m == 0 {
        return Ok(InverseLocalTimeRun::Reached { time: 0, local_times: LocalTimeTable::default() });
    }
    while walker.time() < max_steps {
        let at = walker.position();
        if walker.step(rng)? == Direction::Plus && at == x && walker.l_plus(x) == m {
            return Ok(InverseLocalTimeRun::Reached { time: walker.time(), local_times: walker.local_times() });
        }
    }
    Ok(InverseLocalTimeRun::Censored)
}
