use serde::{Deserialize, Serialize};

/// Shift of a lattice `Z + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeOffset {
    Integer,
    Half,
}

impl LatticeOffset {
    pub fn value(self) -> f64 {
        match self {
            Self::Integer => 0.0,
            Self::Half => 0.5,
        }
    }
}

/// Probability masses on consecutive lattice points `start + i + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice1DDistribution {
    pub offset: LatticeOffset,
    /// Integer index of the first stored mass.
    pub start: i64,
    pub masses: Vec<f64>,
}

impl Lattice1DDistribution {
    pub fn new(offset: LatticeOffset, start: i64, masses: Vec<f64>) -> Self {
        Self { offset, start, masses }
    }

    /// Mass at integer index `i` (the point `i + offset`).
    pub fn mass(&self, i: i64) -> f64 {
        let k = i - self.start;
        if k < 0 || k >= self.masses.len() as i64 {
            0.0
        } else {
            self.masses[k as usize]
        }
    }

    /// Last stored integer index.
    pub fn end(&self) -> i64 {
        self.start + self.masses.len() as i64 - 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.masses.iter().enumerate().map(|(k, &p)| (self.start + k as i64, p))
    }

    pub fn point(&self, i: i64) -> f64 {
        i as f64 + self.offset.value()
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(i, p)| p * self.point(i)).sum::<f64>() / self.total()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.iter().map(|(i, p)| p * (self.point(i) - mean).powi(2)).sum::<f64>() / self.total()
    }

    /// Central moment of order `k`.
    pub fn central_moment(&self, k: i32) -> f64 {
        let mean = self.mean();
        self.iter().map(|(i, p)| p * (self.point(i) - mean).powi(k)).sum::<f64>() / self.total()
    }

    /// Same masses relabelled on the other lattice: the point `i + offset`
    /// becomes `i + new_offset`.
    pub fn with_offset(&self, offset: LatticeOffset) -> Self {
        Self { offset, ..self.clone() }
    }

    /// Drops leading and trailing masses below `threshold`, returning the
    /// discarded mass.
    pub fn trim(&mut self, threshold: f64) -> f64 {
        let first = self.masses.iter().position(|&p| p >= threshold).unwrap_or(self.masses.len());
        let last = self.masses.iter().rposition(|&p| p >= threshold).map_or(first, |l| l + 1);
        let dropped: f64 = self.masses[..first].iter().chain(&self.masses[last.max(first)..]).sum();
        self.masses = self.masses[first..last.max(first)].to_vec();
        self.start += first as i64;
        dropped
    }

    /// Rescales to total mass one.
    pub fn normalized(mut self) -> Self {
        let total = self.total();
        self.masses.iter_mut().for_each(|p| *p /= total);
        self
    }

    /// `max_k |p(k) - p(-k)|` for a law on `Z + 1/2` (pairs `i` with `-1 - i`)
    /// or on `Z` (pairs `i` with `-i`).
    pub fn asymmetry(&self) -> f64 {
        let mirror = |i: i64| match self.offset {
            LatticeOffset::Integer => -i,
            LatticeOffset::Half => -1 - i,
        };
        self.iter().map(|(i, p)| (p - self.mass(mirror(i))).abs()).fold(0.0, f64::max)
    }
}
