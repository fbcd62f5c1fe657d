//! Exact joint law of `(Y, S) = (sum xi_j, sum j xi_j)` for iid `xi` on
//! `Z + 1/2`.
//!
//! Writing `xi_j = k_j + 1/2` the DP runs on the integer pair
//! `(A, B) = (sum k_j, sum j k_j)`, so `Y = A + N/2` and
//! `S = B + N(N+1)/4`. Each `A` owns a contiguous row of `B` values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ray_knight::{Lattice1DDistribution, LatticeOffset};

/// Cells below this mass are dropped from row ends.
pub const DEFAULT_PRUNE: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariateOptions {
    pub prune: f64,
    /// Upper bound on stored cells; exceeding it is a budget error.
    pub max_cells: usize,
}

impl Default for BivariateOptions {
    fn default() -> Self {
        Self { prune: DEFAULT_PRUNE, max_cells: 60_000_000 }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Row {
    b_lo: i64,
    masses: Vec<f64>,
}

impl Row {
    fn b_hi(&self) -> i64 {
        self.b_lo + self.masses.len() as i64 - 1
    }

    fn get(&self, b: i64) -> f64 {
        let k = b - self.b_lo;
        if k < 0 || k >= self.masses.len() as i64 {
            0.0
        } else {
            self.masses[k as usize]
        }
    }

    /// Drops end cells below `prune`, returning the dropped mass.
    fn trim(&mut self, prune: f64) -> f64 {
        let first = self.masses.iter().position(|&p| p >= prune);
        let Some(first) = first else {
            let dropped = self.masses.iter().sum();
            self.masses.clear();
            return dropped;
        };
        let last = self.masses.iter().rposition(|&p| p >= prune).unwrap_or(first);
        let dropped: f64 = self.masses[..first].iter().sum::<f64>() + self.masses[last + 1..].iter().sum::<f64>();
        self.masses.truncate(last + 1);
        self.masses.drain(..first);
        self.b_lo += first as i64;
        dropped
    }
}

/// First and second moments of `(Y, S)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariateMoments {
    pub mean_y: f64,
    pub mean_s: f64,
    pub var_y: f64,
    pub var_s: f64,
    pub cov: f64,
}

/// `P(S = s | Y = y)` on consecutive values `s_start, s_start + 1, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalLaw {
    pub y: f64,
    pub marginal: f64,
    pub s_start: f64,
    pub masses: Vec<f64>,
}

impl ConditionalLaw {
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.masses.iter().enumerate().map(|(i, &p)| (self.s_start + i as f64, p))
    }

    pub fn get(&self, s: f64) -> f64 {
        let k = (s - self.s_start).round();
        if k < 0.0 || k >= self.masses.len() as f64 {
            0.0
        } else {
            self.masses[k as usize]
        }
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(s, p)| s * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.iter().map(|(s, p)| (s - m).powi(2) * p).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePMF {
    n: usize,
    step_law: Lattice1DDistribution,
    a_lo: i64,
    rows: Vec<Row>,
    pruned: f64,
}

impl BivariatePMF {
    fn start(step_law: Lattice1DDistribution) -> Self {
        Self { n: 0, step_law, a_lo: 0, rows: vec![Row { b_lo: 0, masses: vec![1.0] }], pruned: 0.0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn step_law(&self) -> &Lattice1DDistribution {
        &self.step_law
    }

    /// Mass removed by pruning so far.
    pub fn pruned_mass(&self) -> f64 {
        self.pruned
    }

    pub fn cells(&self) -> usize {
        self.rows.iter().map(|r| r.masses.len()).sum()
    }

    pub fn total(&self) -> f64 {
        self.rows.iter().flat_map(|r| r.masses.iter()).sum()
    }

    /// `Y - A`.
    pub fn y_shift(&self) -> f64 {
        self.n as f64 / 2.0
    }

    /// `S - B`.
    pub fn s_shift(&self) -> f64 {
        (self.n * (self.n + 1)) as f64 / 4.0
    }

    /// Stored range of `Y`.
    pub fn y_range(&self) -> (f64, f64) {
        let hi = self.a_lo + self.rows.len() as i64 - 1;
        (self.a_lo as f64 + self.y_shift(), hi as f64 + self.y_shift())
    }

    fn lattice_index(value: f64, shift: f64) -> Option<i64> {
        let k = value - shift;
        let r = k.round();
        ((k - r).abs() < 1e-9).then_some(r as i64)
    }

    fn row(&self, a: i64) -> Option<&Row> {
        let k = a - self.a_lo;
        (k >= 0 && (k as usize) < self.rows.len()).then(|| &self.rows[k as usize])
    }

    /// `P(Y = y, S = s)`; zero off the lattice.
    pub fn mass(&self, y: f64, s: f64) -> f64 {
        match (Self::lattice_index(y, self.y_shift()), Self::lattice_index(s, self.s_shift())) {
            (Some(a), Some(b)) => self.row(a).map_or(0.0, |r| r.get(b)),
            _ => 0.0,
        }
    }

    /// Stored cells as `(y, s, p)`.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let (ys, ss) = (self.y_shift(), self.s_shift());
        self.rows.iter().enumerate().flat_map(move |(i, r)| {
            let y = (self.a_lo + i as i64) as f64 + ys;
            r.masses.iter().enumerate().map(move |(k, &p)| (y, (r.b_lo + k as i64) as f64 + ss, p))
        })
    }

    /// Stored rows as `(y, s_start, masses)`.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, &[f64])> + '_ {
        let (ys, ss) = (self.y_shift(), self.s_shift());
        self.rows
            .iter()
            .enumerate()
            .map(move |(i, r)| ((self.a_lo + i as i64) as f64 + ys, r.b_lo as f64 + ss, r.masses.as_slice()))
    }

    pub fn marginal_y(&self, y: f64) -> f64 {
        Self::lattice_index(y, self.y_shift())
            .and_then(|a| self.row(a))
            .map_or(0.0, |r| r.masses.iter().sum())
    }

    /// Row-normalized law of `S` given `Y = y`.
    pub fn conditional_s(&self, y: f64) -> Result<ConditionalLaw> {
        let row = Self::lattice_index(y, self.y_shift()).and_then(|a| self.row(a));
        let marginal: f64 = row.map_or(0.0, |r| r.masses.iter().sum());
        let row = match row {
            Some(r) if marginal > 0.0 => r,
            _ => return Err(Error::ZeroMass(y)),
        };
        Ok(ConditionalLaw {
            y,
            marginal,
            s_start: row.b_lo as f64 + self.s_shift(),
            masses: row.masses.iter().map(|p| p / marginal).collect(),
        })
    }

    pub fn moments(&self) -> BivariateMoments {
        let (mut t, mut my, mut ms) = (0.0, 0.0, 0.0);
        for (y, s, p) in self.iter() {
            t += p;
            my += y * p;
            ms += s * p;
        }
        my /= t;
        ms /= t;
        let (mut vy, mut vs, mut c) = (0.0, 0.0, 0.0);
        for (y, s, p) in self.iter() {
            vy += (y - my).powi(2) * p;
            vs += (s - ms).powi(2) * p;
            c += (y - my) * (s - ms) * p;
        }
        BivariateMoments { mean_y: my, mean_s: ms, var_y: vy / t, var_s: vs / t, cov: c / t }
    }

    /// Convolves in `xi_{n+1}`.
    fn advance(&mut self, opts: &BivariateOptions) -> Result<()> {
        let j = (self.n + 1) as i64;
        let law = &self.step_law;
        let (k_lo, k_hi) = (law.start, law.end());
        let a_hi = self.a_lo + self.rows.len() as i64 - 1;
        let new_lo = self.a_lo + k_lo;
        let new_hi = a_hi + k_hi;
        let mut next = Vec::with_capacity((new_hi - new_lo + 1) as usize);
        let mut cells = 0usize;
        for a in new_lo..=new_hi {
            let mut lo = i64::MAX;
            let mut hi = i64::MIN;
            for (k, p) in law.iter() {
                if p == 0.0 {
                    continue;
                }
                if let Some(src) = self.row(a - k).filter(|r| !r.masses.is_empty()) {
                    lo = lo.min(src.b_lo + j * k);
                    hi = hi.max(src.b_hi() + j * k);
                }
            }
            if lo > hi {
                next.push(Row::default());
                continue;
            }
            let mut masses = vec![0.0; (hi - lo + 1) as usize];
            for (k, p) in law.iter() {
                if p == 0.0 {
                    continue;
                }
                if let Some(src) = self.row(a - k).filter(|r| !r.masses.is_empty()) {
                    let off = (src.b_lo + j * k - lo) as usize;
                    for (d, s) in masses[off..off + src.masses.len()].iter_mut().zip(&src.masses) {
                        *d += p * s;
                    }
                }
            }
            let mut row = Row { b_lo: lo, masses };
            self.pruned += row.trim(opts.prune);
            cells += row.masses.len();
            next.push(row);
        }
        if cells > opts.max_cells {
            // cells grow like N^2
            let suggested = ((j as f64) * (opts.max_cells as f64 / cells as f64).sqrt()).floor() as usize;
            return Err(Error::Budget { cells, suggested_n: suggested.max(1) });
        }
        let first = next.iter().position(|r| !r.masses.is_empty()).unwrap_or(0);
        let last = next.iter().rposition(|r| !r.masses.is_empty()).unwrap_or(0);
        next.truncate(last + 1);
        next.drain(..first);
        self.a_lo = new_lo + first as i64;
        self.rows = next;
        self.n += 1;
        Ok(())
    }
}

/// Rough count of cells above the prune level at `n`: the Gaussian ellipse
/// `{q <= 2 ln(1/prune)}` has area `pi q sigma^2 n^2 / sqrt(12)`.
pub fn estimated_cells(sigma2: f64, n: usize, prune: f64) -> f64 {
    let q = 2.0 * (1.0 / prune).ln();
    std::f64::consts::PI * q * sigma2 * (n as f64).powi(2) / 12f64.sqrt()
}

fn prepare_law(step_law: &Lattice1DDistribution, prune: f64) -> Result<Lattice1DDistribution> {
    if step_law.offset != LatticeOffset::Half {
        return Err(Error::Precondition("step law must live on Z + 1/2".into()));
    }
    if step_law.masses.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
        return Err(Error::Precondition("step law has negative or non-finite masses".into()));
    }
    let mut law = step_law.clone();
    law.trim(prune);
    if law.masses.is_empty() {
        return Err(Error::ZeroMass(0.0));
    }
    Ok(law.normalized())
}

/// Exact law of `(sum_{j<=n} xi_j, sum_{j<=n} j xi_j)`.
///
/// The step law is first cut to masses `>= prune` and renormalized; the DP
/// is exact for that law up to the tracked pruned mass.
pub fn exact_bivariate_pmf(step_law: &Lattice1DDistribution, n: usize, opts: &BivariateOptions) -> Result<BivariatePMF> {
    Ok(exact_bivariate_ladder(step_law, &[n], opts)?.pop().expect("one rung"))
}

/// Snapshots of the same DP at every `n` in an increasing ladder.
pub fn exact_bivariate_ladder(
    step_law: &Lattice1DDistribution,
    ladder: &[usize],
    opts: &BivariateOptions,
) -> Result<Vec<BivariatePMF>> {
    if ladder.is_empty() || ladder[0] == 0 || ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("ladder must be strictly increasing and start at N >= 1".into()));
    }
    let law = prepare_law(step_law, opts.prune)?;
    let top = *ladder.last().unwrap();
    let estimate = estimated_cells(law.variance(), top, opts.prune);
    if estimate > opts.max_cells as f64 {
        let suggested = (top as f64 * (opts.max_cells as f64 / estimate).sqrt()).floor() as usize;
        return Err(Error::Budget { cells: estimate as usize, suggested_n: suggested.max(1) });
    }
    let mut pmf = BivariatePMF::start(law);
    let mut out = Vec::with_capacity(ladder.len());
    for &n in ladder {
        while pmf.n < n {
            pmf.advance(opts)?;
        }
        out.push(pmf.clone());
    }
    Ok(out)
}
