use std::fmt;

use serde::{Deserialize, Serialize};

use super::Direction;

/// Value of a sup/inf over a possibly empty set of sites. The variant order
/// makes the derived `Ord` agree with the extended integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RangeBound {
    NegInfinity,
    Site(i64),
    PosInfinity,
}

impl RangeBound {
    pub fn site(self) -> Option<i64> {
        match self {
            Self::Site(x) => Some(x),
            _ => None,
        }
    }
}

impl fmt::Display for RangeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NegInfinity => f.write_str("-inf"),
            Self::Site(x) => write!(f, "{x}"),
            Self::PosInfinity => f.write_str("inf"),
        }
    }
}

/// Directed-edge local times `x -> (l+, l-)`, stored densely over the
/// window of sites that have been touched.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LocalTimeTable {
    lo: i64,
    plus: Vec<u64>,
    minus: Vec<u64>,
}

impl LocalTimeTable {
    /// Builds a table from dense columns starting at site `lo`.
    pub fn from_dense(lo: i64, plus: Vec<u64>, minus: Vec<u64>) -> Self {
        assert_eq!(plus.len(), minus.len());
        let mut table = Self { lo, plus, minus };
        table.trim();
        table
    }

    fn trim(&mut self) {
        let nonzero = |i: usize| self.plus[i] != 0 || self.minus[i] != 0;
        let n = self.plus.len();
        let first = (0..n).find(|&i| nonzero(i));
        match first {
            None => *self = Self::default(),
            Some(first) => {
                let last = (0..n).rev().find(|&i| nonzero(i)).unwrap_or(first);
                self.plus = self.plus[first..=last].to_vec();
                self.minus = self.minus[first..=last].to_vec();
                self.lo += first as i64;
            }
        }
    }

    fn ensure(&mut self, x: i64) -> usize {
        if self.plus.is_empty() {
            self.lo = x;
            self.plus.push(0);
            self.minus.push(0);
        } else if x < self.lo {
            let extra = (self.lo - x) as usize;
            self.plus.splice(0..0, std::iter::repeat_n(0, extra));
            self.minus.splice(0..0, std::iter::repeat_n(0, extra));
            self.lo = x;
        } else if x >= self.lo + self.plus.len() as i64 {
            let len = (x - self.lo + 1) as usize;
            self.plus.resize(len, 0);
            self.minus.resize(len, 0);
        }
        (x - self.lo) as usize
    }

    /// Counts one departure from `x` in direction `dir`.
    pub fn record(&mut self, x: i64, dir: Direction) {
        let i = self.ensure(x);
        match dir {
            Direction::Plus => self.plus[i] += 1,
            Direction::Minus => self.minus[i] += 1,
        }
    }

    pub fn get(&self, x: i64) -> (u64, u64) {
        let i = x - self.lo;
        if i < 0 || i >= self.plus.len() as i64 {
            (0, 0)
        } else {
            (self.plus[i as usize], self.minus[i as usize])
        }
    }

    pub fn plus(&self, x: i64) -> u64 {
        self.get(x).0
    }

    pub fn minus(&self, x: i64) -> u64 {
        self.get(x).1
    }

    /// Smallest and largest stored sites, if any.
    pub fn site_range(&self) -> Option<(i64, i64)> {
        (!self.plus.is_empty()).then(|| (self.lo, self.lo + self.plus.len() as i64 - 1))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, u64, u64)> + '_ {
        self.plus.iter().zip(&self.minus).enumerate().map(|(i, (&p, &m))| (self.lo + i as i64, p, m))
    }

    pub fn total_plus(&self) -> u64 {
        self.plus.iter().sum()
    }

    pub fn total_minus(&self) -> u64 {
        self.minus.iter().sum()
    }

    /// Total number of recorded steps.
    pub fn total(&self) -> u64 {
        self.total_plus() + self.total_minus()
    }

    /// `sup{x : l+(x) > 0}`.
    pub fn rho(&self) -> RangeBound {
        self.iter().filter(|&(_, p, _)| p > 0).map(|(x, _, _)| x).last().map_or(RangeBound::NegInfinity, RangeBound::Site)
    }

    /// `inf{x : l-(x) > 0}`.
    pub fn lambda(&self) -> RangeBound {
        self.iter().find(|&(_, _, m)| m > 0).map_or(RangeBound::PosInfinity, |(x, _, _)| RangeBound::Site(x))
    }
}
