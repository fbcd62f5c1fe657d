//! Statistical reductions shared by the campaigns.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// A frequency or mean with its standard error and sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
    pub n: u64,
}

impl Estimate {
    /// Binomial proportion `hits / n`.
    pub fn proportion(hits: u64, n: u64) -> Self {
        if n == 0 {
            return Self { value: 0.0, se: 0.0, n };
        }
        let p = hits as f64 / n as f64;
        Self { value: p, se: (p * (1.0 - p) / n as f64).sqrt(), n }
    }

    /// Sample mean from running sums of `x` and `x^2`.
    pub fn mean(sum: f64, sum_sq: f64, n: u64) -> Self {
        if n == 0 {
            return Self { value: 0.0, se: 0.0, n };
        }
        let nf = n as f64;
        let m = sum / nf;
        let var = if n > 1 { ((sum_sq - nf * m * m) / (nf - 1.0)).max(0.0) } else { 0.0 };
        Self { value: m, se: (var / nf).sqrt(), n }
    }

    pub fn scaled(self, k: f64) -> Self {
        Self { value: self.value * k, se: self.se * k.abs(), n: self.n }
    }

    /// `|value - target| <= z * se`.
    pub fn within(&self, target: f64, z: f64) -> bool {
        (self.value - target).abs() <= z * self.se
    }
}

/// One-sided upper confidence bound for a proportion after `hits` in `n`
/// trials: exact for zero hits (`1 - alpha^{1/n}`), normal otherwise.
pub fn upper_bound(hits: u64, n: u64, alpha: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if hits == 0 {
        return 1.0 - alpha.powf(1.0 / n as f64);
    }
    let e = Estimate::proportion(hits, n);
    let z = statrs::distribution::Normal::standard().inverse_cdf(1.0 - alpha);
    (e.value + z * e.se).min(1.0)
}

/// Kolmogorov-Smirnov distance between lattice data and `U(-1, 1)`.
///
/// Each atom at `x` is spread uniformly over `[x - cell/2, x + cell/2]`
/// before comparing, so lattice granularity alone contributes nothing.
/// `atoms` are `(x, count)` with `x` increasing.
pub fn ks_uniform_lattice(atoms: &[(f64, u64)], cell: f64) -> f64 {
    let total: u64 = atoms.iter().map(|a| a.1).sum();
    if total == 0 {
        return 1.0;
    }
    let cdf = |t: f64| ((t + 1.0) / 2.0).clamp(0.0, 1.0);
    let mut cum = 0u64;
    let mut d = 0.0f64;
    for &(x, c) in atoms {
        d = d.max((cum as f64 / total as f64 - cdf(x - cell / 2.0)).abs());
        cum += c;
        d = d.max((cum as f64 / total as f64 - cdf(x + cell / 2.0)).abs());
    }
    d
}

/// Pearson goodness-of-fit against `probs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Bins with expected count below 5 are pooled with their neighbours
/// (left to right) before the test.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<ChiSquare> {
    if observed.len() != probs.len() {
        return Err(Error::Precondition("observed and expected lengths differ".into()));
    }
    let n: u64 = observed.iter().sum();
    if n == 0 {
        return Err(Error::Precondition("no observations".into()));
    }
    let nf = n as f64;
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&obs, &p) in observed.iter().zip(probs) {
        o += obs as f64;
        e += p * nf;
        if e >= 5.0 {
            bins.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => bins.push((o, e)),
        }
    }
    if bins.iter().any(|b| b.1 == 0.0 && b.0 > 0.0) {
        return Ok(ChiSquare { statistic: f64::INFINITY, dof: bins.len().saturating_sub(1), p_value: 0.0 });
    }
    let statistic: f64 = bins.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = bins.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        let chi = ChiSquared::new(dof as f64).map_err(|e| Error::Precondition(e.to_string()))?;
        1.0 - chi.cdf(statistic)
    };
    Ok(ChiSquare { statistic, dof, p_value })
}

/// `(1/2) sum |p_i - q_i|` over aligned vectors (missing entries are zero).
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..len).map(|i| (at(p, i) - at(q, i)).abs()).sum::<f64>()
}

/// Normalizes integer counts into frequencies.
pub fn frequencies(counts: &[u64]) -> Vec<f64> {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return vec![0.0; counts.len()];
    }
    counts.iter().map(|&c| c as f64 / n as f64).collect()
}

/// `q`-quantile (nearest rank) of unsorted data.
pub fn quantile(data: &[f64], q: f64) -> f64 {
    if data.is_empty() {
        return f64::NAN;
    }
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    let k = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[k - 1]
}

/// True when every successive value is at most the previous one plus
/// `z` combined standard errors.
pub fn non_increasing(est: &[Estimate], z: f64) -> bool {
    est.windows(2).all(|w| w[1].value <= w[0].value + z * (w[0].se.powi(2) + w[1].se.powi(2)).sqrt())
}

/// Integer-valued counts on `[lo, lo + counts.len())`; values outside are
/// tallied in `outside`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: i64,
    pub counts: Vec<u64>,
    pub outside: u64,
}

impl Histogram {
    pub fn new(lo: i64, len: usize) -> Self {
        Self { lo, counts: vec![0; len], outside: 0 }
    }

    #[inline]
    pub fn add(&mut self, x: i64) {
        let k = x - self.lo;
        if k >= 0 && (k as usize) < self.counts.len() {
            self.counts[k as usize] += 1;
        } else {
            self.outside += 1;
        }
    }

    pub fn get(&self, x: i64) -> u64 {
        let k = x - self.lo;
        if k >= 0 && (k as usize) < self.counts.len() {
            self.counts[k as usize]
        } else {
            0
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.outside
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.counts.iter().enumerate().map(|(k, &c)| (self.lo + k as i64, c))
    }

    pub fn merge(&mut self, other: &Self) {
        assert_eq!((self.lo, self.counts.len()), (other.lo, other.counts.len()));
        self.counts.iter_mut().zip(&other.counts).for_each(|(a, b)| *a += b);
        self.outside += other.outside;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn histogram_counts_and_merges() {
        let mut h = Histogram::new(-2, 4);
        for x in [-2, 1, 1, 5, -3] {
            h.add(x);
        }
        assert_eq!((h.get(1), h.get(-2), h.get(0), h.outside, h.total()), (2, 1, 0, 2, 5));
        let copy = h.clone();
        h.merge(&copy);
        assert_eq!(h.get(1), 4);
        assert_eq!(h.iter().map(|(_, c)| c).sum::<u64>(), 6);
    }

    #[test]
    fn proportion_estimate() {
        let e = Estimate::proportion(25, 100);
        assert_eq!(e.value, 0.25);
        assert_relative_eq!(e.se, (0.25f64 * 0.75 / 100.0).sqrt());
        assert!(e.within(0.3, 3.0));
    }

    #[test]
    fn mean_estimate() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let e = Estimate::mean(xs.iter().sum(), xs.iter().map(|x| x * x).sum(), 4);
        assert_eq!(e.value, 2.5);
        assert_relative_eq!(e.se, (5.0f64 / 3.0 / 4.0).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn zero_hit_bound() {
        assert_relative_eq!(upper_bound(0, 1000, 0.05), 1.0 - 0.05f64.powf(1e-3), epsilon = 1e-15);
        assert!(upper_bound(0, 1000, 0.05) < 0.0031);
        assert!(upper_bound(10, 1000, 0.05) > 0.01);
    }

    #[test]
    fn ks_of_a_perfect_lattice_is_zero() {
        // n = 4: atoms at -0.75, -0.25, 0.25, 0.75 with cell 0.5
        let atoms: Vec<(f64, u64)> = [-0.75, -0.25, 0.25, 0.75].iter().map(|&x| (x, 10)).collect();
        assert!(ks_uniform_lattice(&atoms, 0.5) < 1e-15);
        let atoms = vec![(-0.75, 40), (0.75, 0)];
        assert_relative_eq!(ks_uniform_lattice(&atoms, 0.5), 0.75, epsilon = 1e-15);
        assert_eq!(ks_uniform_lattice(&[(0.0, 0)], 0.5), 1.0);
    }

    #[test]
    fn chi_square_pools_small_bins() {
        let probs = [0.5, 0.49, 0.004, 0.006];
        let obs = [500, 490, 6, 4];
        let r = chi_square_gof(&obs, &probs).unwrap();
        assert_eq!(r.dof, 2);
        assert!(r.p_value > 0.5);
        let bad = chi_square_gof(&[900, 100, 0, 0], &probs).unwrap();
        assert!(bad.p_value < 1e-10);
        assert!(chi_square_gof(&[1], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn tv_and_quantiles() {
        assert_relative_eq!(total_variation(&[0.5, 0.5], &[1.0]), 0.5);
        assert_eq!(quantile(&[3.0, 1.0, 2.0], 0.5), 2.0);
        assert_eq!(quantile(&[3.0, 1.0, 2.0], 0.95), 3.0);
    }

    #[test]
    fn monotone_within_errors() {
        let e = |v| Estimate { value: v, se: 0.01, n: 100 };
        assert!(non_increasing(&[e(0.5), e(0.3), e(0.31)], 3.0));
        assert!(!non_increasing(&[e(0.3), e(0.5)], 3.0));
    }
}
