//! Reducers over local-time profiles at inverse local times, mostly fed
//! by the Ray-Knight sampler.

use serde::{Deserialize, Serialize};

use super::config::Growth;
use crate::error::Result;
use crate::lclt::bulk_edge;
use crate::par::{try_fold_replicas, Execution};
use crate::ray_knight::ProfileSampler;
use crate::rng::replica_rng;
use crate::stats::total_variation;

/// Empirical law of `l+(T, y)` for each `|y| <= reach`, values capped at
/// `cap` (the last bin collects `>= cap`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileLaw {
    pub reach: i64,
    pub cap: usize,
    /// `counts[y + reach][value]`.
    pub counts: Vec<Vec<u64>>,
    pub censored: u64,
}

impl ProfileLaw {
    pub fn new(reach: i64, cap: usize) -> Self {
        Self { reach, cap, counts: vec![vec![0; cap + 1]; (2 * reach + 1) as usize], censored: 0 }
    }

    pub fn add(&mut self, plus: impl Fn(i64) -> u64) {
        for (k, row) in self.counts.iter_mut().enumerate() {
            let v = plus(k as i64 - self.reach) as usize;
            row[v.min(self.cap)] += 1;
        }
    }

    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        self.censored += other.censored;
    }

    /// Profiles actually recorded.
    pub fn recorded(&self) -> u64 {
        self.counts[0].iter().sum()
    }

    pub fn counts_at(&self, y: i64) -> &[u64] {
        &self.counts[(y + self.reach) as usize]
    }

    pub fn law(&self, y: i64) -> Vec<f64> {
        crate::stats::frequencies(self.counts_at(y))
    }

    /// `(y, TV)` between the two laws at every site.
    pub fn total_variation(&self, other: &Self) -> Vec<(i64, f64)> {
        (-self.reach..=self.reach).map(|y| (y, total_variation(&self.law(y), &other.law(y)))).collect()
    }
}

/// Law of `y -> l+(T+_{0,m}, y)` from the Ray-Knight sampler.
pub fn rk_profile_law(
    exec: Execution,
    sampler: &ProfileSampler,
    m: u64,
    reach: i64,
    cap: usize,
    replicas: u64,
    seed: u64,
) -> Result<ProfileLaw> {
    try_fold_replicas(
        exec,
        replicas,
        || (),
        || ProfileLaw::new(reach, cap),
        |_, law, r| {
            let t = sampler.sample(0, m, &mut replica_rng(seed, r))?;
            law.add(|y| t.plus(y));
            Ok(())
        },
        |a, b| a.merge(&b),
    )
}

/// Hit counts of the four tail events at `T+_{0,m}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TailCounts {
    /// `rho >= 2m + sqrt(m) g(m)`.
    pub rho: u64,
    /// `lambda <= -(2m + sqrt(m) g(m))`.
    pub lambda: u64,
    /// `l+(floor(2m - 4 sqrt(m g))) >= 3 sqrt(m g)`.
    pub l_above: u64,
    /// `min_{1 <= x <= 2m - 4 sqrt(m g)} l+(x) <= sqrt(m g)`.
    pub l_below: u64,
    pub replicas: u64,
}

/// Thresholds of the tail events for given `m` and `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailThresholds {
    pub range: f64,
    pub edge: i64,
    pub high: f64,
    pub low: f64,
}

impl TailThresholds {
    pub fn new(m: u64, growth: Growth) -> Self {
        let mf = m as f64;
        let g = growth.eval(mf);
        let root = (mf * g).sqrt();
        Self { range: 2.0 * mf + mf.sqrt() * g, edge: (2.0 * mf - 4.0 * root).floor() as i64, high: 3.0 * root, low: root }
    }
}

pub fn tail_events(
    exec: Execution,
    sampler: &ProfileSampler,
    m: u64,
    growth: Growth,
    replicas: u64,
    seed: u64,
) -> Result<TailCounts> {
    let th = TailThresholds::new(m, growth);
    try_fold_replicas(
        exec,
        replicas,
        || (),
        TailCounts::default,
        |_, acc, r| {
            let t = sampler.sample(0, m, &mut replica_rng(seed, r))?;
            acc.rho += u64::from(t.rho().site().is_some_and(|s| s as f64 >= th.range));
            acc.lambda += u64::from(t.lambda().site().is_some_and(|s| s as f64 <= -th.range));
            acc.l_above += u64::from(t.plus(th.edge) as f64 >= th.high);
            let dip = (1..=th.edge).any(|x| t.plus(x) as f64 <= th.low);
            acc.l_below += u64::from(dip);
            acc.replicas += 1;
            Ok(())
        },
        |a, b| {
            a.rho += b.rho;
            a.lambda += b.lambda;
            a.l_above += b.l_above;
            a.l_below += b.l_below;
            a.replicas += b.replicas;
        },
    )
}

/// Running sums of the boundary terms `W1 = sum_{y > L} l+(y)` and
/// `W2 = sum_{y < -L} l+(y)` at `T+_{x,m}`, plus exceedances of `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundarySums {
    pub w1_exceed: u64,
    pub w2_exceed: u64,
    pub w1_sum: f64,
    pub w1_sq: f64,
    pub w2_sum: f64,
    pub w2_sq: f64,
    pub replicas: u64,
}

#[allow(clippy::too_many_arguments)]
pub fn boundary_sums(
    exec: Execution,
    sampler: &ProfileSampler,
    n: f64,
    x: i64,
    m: u64,
    threshold: f64,
    replicas: u64,
    seed: u64,
) -> Result<BoundarySums> {
    let big_l = bulk_edge(n);
    try_fold_replicas(
        exec,
        replicas,
        || (),
        BoundarySums::default,
        |_, acc, r| {
            let t = sampler.sample(x, m, &mut replica_rng(seed, r))?;
            let (mut w1, mut w2) = (0u64, 0u64);
            for (y, plus, _) in t.iter() {
                if y > big_l {
                    w1 += plus;
                } else if y < -big_l {
                    w2 += plus;
                }
            }
            let (w1, w2) = (w1 as f64, w2 as f64);
            acc.w1_exceed += u64::from(w1 > threshold);
            acc.w2_exceed += u64::from(w2 > threshold);
            acc.w1_sum += w1;
            acc.w1_sq += w1 * w1;
            acc.w2_sum += w2;
            acc.w2_sq += w2 * w2;
            acc.replicas += 1;
            Ok(())
        },
        |a, b| {
            a.w1_exceed += b.w1_exceed;
            a.w2_exceed += b.w2_exceed;
            a.w1_sum += b.w1_sum;
            a.w1_sq += b.w1_sq;
            a.w2_sum += b.w2_sum;
            a.w2_sq += b.w2_sq;
            a.replicas += b.replicas;
        },
    )
}

/// `sum_{|j| <= K sqrt(n)} sqrt(4/(beta pi n)) exp(-4 j^2/(beta n))`, a
/// Riemann sum of a unit-mass Gaussian.
pub fn riemann_sum(n: f64, beta: f64, k: f64) -> f64 {
    let reach = (k * n.sqrt()).floor() as i64;
    let scale = (4.0 / (beta * std::f64::consts::PI * n)).sqrt();
    (-reach..=reach).map(|j| scale * (-4.0 * (j * j) as f64 / (beta * n)).exp()).sum()
}
