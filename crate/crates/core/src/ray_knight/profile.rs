//! Local-time profile `y -> l(y)` at the inverse local time `T+_{x,m}`
//! (`x <= 0`), built site by site from independent `eta` chains instead of
//! simulating the walk.
//!
//! At `T+_{x,m}` the walk has just crossed `x -> x + 1`. Counting crossings
//! of each edge gives, for sites `s > x`,
//!
//! ```text
//! l-(s) = l+(s - 1) - [s == x + 1] + [s <= 0],   l+(s) = l-(s) + eta-^{s}_{l-(s)}
//! ```
//!
//! and for sites `y <= x`, `l+(y - 1) = l-(y) = l+(y) + eta+^{y}_{l+(y)}`, with
//! `l+(x) = m`. Away from `s = x + 1` these are the usual relations with the
//! chain index `l+(y) + 1` on `x <= y < 0` and `l+(y)` on `y >= 0`. Every
//! site reads its own chain at exactly one index, so only the marginal law
//! of `eta_j` matters.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::chain::{ChainStepper, EtaMarginals, RowSampler};
use super::kernel::{EtaKernel, DEFAULT_EPS_TAIL};
use crate::error::{Error, Result};
use crate::rng::replica_rng;
use crate::walk::LocalTimeTable;
use crate::weight::WeightFunction;

/// State window used for kernel caching and marginal tables.
pub const PROFILE_WINDOW: (i64, i64) = (-40, 40);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ChainIndexing {
    /// Draw `eta_j` from the precomputed law of the chain at index `j`.
    #[default]
    Marginal,
    /// Run a fresh chain for `j` steps.
    Simulate,
}

#[derive(Debug, Clone)]
pub struct ProfileSampler {
    stepper: ChainStepper,
    marginals: EtaMarginals,
    indexing: ChainIndexing,
}

impl ProfileSampler {
    pub fn new(w: &WeightFunction, indexing: ChainIndexing) -> Result<Self> {
        let kernel = EtaKernel::new(w, PROFILE_WINDOW, DEFAULT_EPS_TAIL)?;
        let marginals = EtaMarginals::new(&kernel, PROFILE_WINDOW, 1e-15, 1 << 20)?;
        Ok(Self { stepper: ChainStepper::new(&kernel), marginals, indexing })
    }

    pub fn indexing(&self) -> ChainIndexing {
        self.indexing
    }

    pub fn marginals(&self) -> &EtaMarginals {
        &self.marginals
    }

    /// Entry `j` of a fresh chain started at 0.
    #[inline]
    pub fn eta<R: RngCore>(&self, j: u64, rng: &mut R) -> Result<i64> {
        match self.indexing {
            ChainIndexing::Marginal => Ok(self.marginals.sample(j, rng)),
            ChainIndexing::Simulate => {
                let mut state = 0;
                for _ in 0..j {
                    state = self.stepper.step(state, rng)?;
                }
                Ok(state)
            }
        }
    }

    /// Samples `y -> (l+(T, y), l-(T, y))` at `T = T+_{x,m}`.
    pub fn sample<R: RngCore>(&self, x: i64, m: u64, rng: &mut R) -> Result<LocalTimeTable> {
        build_profile(x, m, |_, j| self.eta(j, rng))
    }

    /// Like [`sample`](Self::sample) but each site's `eta` is drawn by
    /// inverse CDF from a uniform shared with a draw from `stationary`, the
    /// law of `r - 1/2`. Returns the profile and `(site, r)` for every site
    /// that read its chain. Only meaningful for marginal indexing.
    pub fn sample_coupled<R: RngCore>(
        &self,
        x: i64,
        m: u64,
        stationary: &RowSampler,
        rng: &mut R,
    ) -> Result<(LocalTimeTable, Vec<(i64, f64)>)> {
        let mut rs = Vec::new();
        let profile = build_profile(x, m, |site, j| {
            let u = rng.random::<f64>();
            rs.push((site, stationary.quantile(u) as f64 + 0.5));
            Ok(self.marginals.quantile(j, u))
        })?;
        Ok((profile, rs))
    }
}

/// Profile from the relations above; `eta(site, j)` supplies entry `j >= 1`
/// of the chain at `site`.
fn build_profile<F>(x: i64, m: u64, mut eta: F) -> Result<LocalTimeTable>
where
    F: FnMut(i64, u64) -> Result<i64>,
{
    if m == 0 {
        return Err(Error::Precondition("m = 0 gives a degenerate inverse local time".into()));
    }
    if x > 0 {
        return Err(Error::Precondition(format!("profile sampler needs x <= 0, got {x}")));
    }
    let mut next_count = |site: i64, count: u64| -> Result<u64> {
        if count == 0 {
            return Ok(0);
        }
        let next = count as i64 + eta(site, count)?;
        debug_assert!(next >= 0);
        Ok(next as u64)
    };
    // Sites x, x+1, ... to the right.
    let mut right_plus = vec![m];
    let mut right_minus = Vec::new();
    let mut s = x + 1;
    let mut prev = m;
    loop {
        let minus = prev + u64::from(s <= 0) - u64::from(s == x + 1);
        let plus = next_count(s, minus)?;
        right_minus.push(minus);
        right_plus.push(plus);
        if s > 0 && plus == 0 {
            break;
        }
        prev = plus;
        s += 1;
    }
    // Sites x, x-1, ... to the left; l-(y) = l+(y - 1) there.
    let mut left_plus = Vec::new();
    let mut left_minus = Vec::new();
    let mut cur = m;
    let mut y = x;
    while cur > 0 {
        let below = next_count(y, cur)?;
        left_minus.push(below);
        left_plus.push(below);
        cur = below;
        y -= 1;
    }
    // left_plus[k] is l+(x - 1 - k), left_minus[k] is l-(x - k).
    let depth = left_plus.len() as i64;
    let lo = x - depth;
    let len = (right_plus.len() as i64 + depth) as usize;
    let mut plus = vec![0u64; len];
    let mut minus = vec![0u64; len];
    for (k, &p) in left_plus.iter().enumerate() {
        plus[(x - 1 - k as i64 - lo) as usize] = p;
    }
    for (k, &l) in left_minus.iter().enumerate() {
        minus[(x - k as i64 - lo) as usize] = l;
    }
    for (k, &p) in right_plus.iter().enumerate() {
        plus[(x + k as i64 - lo) as usize] = p;
    }
    for (k, &l) in right_minus.iter().enumerate() {
        minus[(x + 1 + k as i64 - lo) as usize] = l;
    }
    Ok(LocalTimeTable::from_dense(lo, plus, minus))
}

/// One profile at `T+_{x,m}`, deterministic in `seed`.
pub fn rk_profile_sampler(w: &WeightFunction, x: i64, m: u64, seed: u64) -> Result<LocalTimeTable> {
    ProfileSampler::new(w, ChainIndexing::Marginal)?.sample(x, m, &mut replica_rng(seed, 0))
}
