//! Transition kernel of the `eta` chain.
//!
//! From state `eta` the walk at a fixed site has `d = -eta`. It leaves the
//! site to the left `L >= 0` times (each lowering `d` by one) and then to the
//! right once, after which the chain sits at `eta + L - 1`. With
//! `p(d) = w(-d) / (w(d) + w(-d))`:
//!
//! ```text
//! P(eta -> eta + L - 1) = p(-eta - L) * prod_{i < L} (1 - p(-eta - i))
//! ```
//!
//! The `eta-` chain has the same kernel because `p(-d) = 1 - p(d)`.

use std::borrow::Cow;

use super::lattice::{Lattice1DDistribution, LatticeOffset};
use crate::error::{Error, Result};
use crate::weight::{step_probability, WeightFunction};

/// Rows are cut once the remaining product falls below this mass.
pub const DEFAULT_EPS_TAIL: f64 = 1e-14;

const MAX_ROW_LEN: usize = 1 << 16;

/// Row `P(state, .)` on `Z`, starting at `state - 1`. The mass beyond the
/// cut is at most `eps_tail` and is not stored.
pub fn eta_kernel_row(w: &WeightFunction, state: i64, eps_tail: f64) -> Result<Lattice1DDistribution> {
    if !(eps_tail > 0.0 && eps_tail < 1.0) {
        return Err(Error::Precondition(format!("eps_tail {eps_tail} must lie in (0, 1)")));
    }
    let mut masses = Vec::new();
    let mut survive = 1.0f64;
    for l in 0..MAX_ROW_LEN as i64 {
        let right = step_probability(w, -state - l)?;
        masses.push(survive * right);
        survive *= 1.0 - right;
        if survive < eps_tail {
            return Ok(Lattice1DDistribution::new(LatticeOffset::Integer, state - 1, masses));
        }
    }
    Err(Error::DivergingTail { state, tail: survive, steps: MAX_ROW_LEN })
}

/// Kernel rows cached on a window of states; rows outside the window are
/// computed on request.
#[derive(Debug, Clone)]
pub struct EtaKernel {
    weight: WeightFunction,
    eps_tail: f64,
    lo: i64,
    rows: Vec<Lattice1DDistribution>,
}

impl EtaKernel {
    pub fn new(w: &WeightFunction, window: (i64, i64), eps_tail: f64) -> Result<Self> {
        let (lo, hi) = window;
        if lo > hi {
            return Err(Error::Precondition(format!("empty window [{lo}, {hi}]")));
        }
        let rows = (lo..=hi).map(|s| eta_kernel_row(w, s, eps_tail)).collect::<Result<Vec<_>>>()?;
        Ok(Self { weight: w.clone(), eps_tail, lo, rows })
    }

    pub fn weight(&self) -> &WeightFunction {
        &self.weight
    }

    pub fn eps_tail(&self) -> f64 {
        self.eps_tail
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.lo + self.rows.len() as i64 - 1)
    }

    pub fn cached_row(&self, state: i64) -> Option<&Lattice1DDistribution> {
        let k = state - self.lo;
        (k >= 0 && (k as usize) < self.rows.len()).then(|| &self.rows[k as usize])
    }

    pub fn row(&self, state: i64) -> Result<Cow<'_, Lattice1DDistribution>> {
        match self.cached_row(state) {
            Some(row) => Ok(Cow::Borrowed(row)),
            None => eta_kernel_row(&self.weight, state, self.eps_tail).map(Cow::Owned),
        }
    }
}
