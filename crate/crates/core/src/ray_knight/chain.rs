//! Sampling the `eta` chain, either step by step from kernel rows or
//! directly at a given index from precomputed marginal laws.

use rand::{Rng, RngCore};

use super::kernel::EtaKernel;
use super::lattice::Lattice1DDistribution;
use super::stationary::WindowPropagator;
use crate::error::{Error, Result};
use crate::rng::replica_rng;
use crate::walk::{Direction, EtaSequence};

/// Inverse-CDF sampler over a lattice law on `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct RowSampler {
    start: i64,
    cdf: Vec<f64>,
}

impl RowSampler {
    pub fn new(law: &Lattice1DDistribution) -> Self {
        let total = law.total();
        let mut acc = 0.0;
        let cdf = law
            .masses
            .iter()
            .map(|p| {
                acc += p / total;
                acc
            })
            .collect();
        Self { start: law.start, cdf }
    }

    /// Maps `u` in `[0, 1)` to a lattice index.
    #[inline]
    pub fn quantile(&self, u: f64) -> i64 {
        let k = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        self.start + k as i64
    }

    #[inline]
    pub fn sample<R: RngCore>(&self, rng: &mut R) -> i64 {
        self.quantile(rng.random::<f64>())
    }
}

/// Row samplers for every state in the kernel window.
#[derive(Debug, Clone)]
pub(crate) struct ChainStepper {
    kernel: EtaKernel,
    lo: i64,
    rows: Vec<RowSampler>,
}

impl ChainStepper {
    pub(crate) fn new(kernel: &EtaKernel) -> Self {
        let (lo, hi) = kernel.window();
        let rows = (lo..=hi).map(|s| RowSampler::new(kernel.cached_row(s).expect("state in window"))).collect();
        Self { kernel: kernel.clone(), lo, rows }
    }

    #[inline]
    pub(crate) fn step<R: RngCore>(&self, state: i64, rng: &mut R) -> Result<i64> {
        let k = state - self.lo;
        if k >= 0 && (k as usize) < self.rows.len() {
            Ok(self.rows[k as usize].sample(rng))
        } else {
            let row = self.kernel.row(state)?;
            Ok(RowSampler::new(&row).sample(rng))
        }
    }
}

/// `length` entries of the chain started at `eta_0 = 0`.
pub fn sample_eta_chain(kernel: &EtaKernel, length: usize, seed: u64) -> Result<EtaSequence> {
    sample_eta_chain_with(kernel, length, &mut replica_rng(seed, 0))
}

pub fn sample_eta_chain_with<R: RngCore>(kernel: &EtaKernel, length: usize, rng: &mut R) -> Result<EtaSequence> {
    if length == 0 {
        return Err(Error::Precondition("chain length must be at least 1".into()));
    }
    let stepper = ChainStepper::new(kernel);
    let mut seq = EtaSequence::new(0, Direction::Plus);
    let mut state = 0;
    for j in 1..length {
        state = stepper.step(state, rng)?;
        seq.values.push(state);
        seq.times.push(j as u64);
    }
    Ok(seq)
}

/// Laws of `eta_j` (chain started at 0) for `j = 0, 1, ...` until successive
/// laws agree to `tolerance` in total variation; later indices reuse the
/// last law.
#[derive(Debug, Clone)]
pub struct EtaMarginals {
    samplers: Vec<RowSampler>,
    laws: Vec<Lattice1DDistribution>,
}

impl EtaMarginals {
    pub fn new(kernel: &EtaKernel, window: (i64, i64), tolerance: f64, max_index: usize) -> Result<Self> {
        let propagator = WindowPropagator::new(kernel, window)?;
        let lo = propagator.lo();
        let n = (window.1 - window.0 + 1) as usize;
        let mut v = vec![0.0; n];
        v[(-lo) as usize] = 1.0;
        let mut next = vec![0.0; n];
        let mut laws = vec![law_on_window(lo, &v)];
        loop {
            propagator.apply(&v, &mut next);
            let tv: f64 = 0.5 * v.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum::<f64>();
            std::mem::swap(&mut v, &mut next);
            laws.push(law_on_window(lo, &v));
            if tv < tolerance {
                break;
            }
            if laws.len() > max_index {
                return Err(Error::NoConvergence { residual: tv, iterations: max_index });
            }
        }
        let samplers = laws.iter().map(RowSampler::new).collect();
        Ok(Self { samplers, laws })
    }

    /// Index from which the marginal law is treated as stationary.
    pub fn horizon(&self) -> usize {
        self.laws.len() - 1
    }

    pub fn law(&self, j: u64) -> &Lattice1DDistribution {
        &self.laws[(j as usize).min(self.horizon())]
    }

    #[inline]
    pub fn quantile(&self, j: u64, u: f64) -> i64 {
        self.samplers[(j as usize).min(self.horizon())].quantile(u)
    }

    #[inline]
    pub fn sample<R: RngCore>(&self, j: u64, rng: &mut R) -> i64 {
        self.samplers[(j as usize).min(self.horizon())].sample(rng)
    }
}

fn law_on_window(lo: i64, v: &[f64]) -> Lattice1DDistribution {
    let mut law = Lattice1DDistribution::new(super::LatticeOffset::Integer, lo, v.to_vec());
    law.trim(f64::MIN_POSITIVE);
    law
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ray_knight::DEFAULT_EPS_TAIL;
    use crate::weight::WeightFunction;

    fn kernel(w: &str) -> EtaKernel {
        EtaKernel::new(&w.parse::<WeightFunction>().unwrap(), (-40, 40), DEFAULT_EPS_TAIL).unwrap()
    }

    #[test]
    fn quantile_edges() {
        let s = RowSampler::new(&Lattice1DDistribution::new(super::super::LatticeOffset::Integer, -1, vec![0.25, 0.75]));
        assert_eq!(s.quantile(0.0), -1);
        assert_eq!(s.quantile(0.2499), -1);
        assert_eq!(s.quantile(0.25), 0);
        assert_eq!(s.quantile(0.9999999), 0);
    }

    #[test]
    fn chain_starts_at_zero_and_is_seeded() {
        let k = kernel("exp:1");
        let a = sample_eta_chain(&k, 1000, 5).unwrap();
        assert_eq!(a.values[0], 0);
        assert_eq!(a.len(), 1000);
        assert_eq!(a, sample_eta_chain(&k, 1000, 5).unwrap());
        assert!(a.values.windows(2).all(|p| p[1] >= p[0] - 1));
        assert!(sample_eta_chain(&k, 0, 5).is_err());
    }

    #[test]
    fn marginals_start_at_delta_zero() {
        let k = kernel("exp:1");
        let m = EtaMarginals::new(&k, (-40, 40), 1e-15, 100_000).unwrap();
        assert_eq!(m.law(0).masses, vec![1.0]);
        let row = k.cached_row(0).unwrap();
        for i in -1..=3 {
            assert!((m.law(1).mass(i) - row.mass(i) / row.total()).abs() < 1e-15);
        }
        // eta_j >= -j
        for j in 0..10u64 {
            assert!(m.law(j).start >= -(j as i64));
        }
        assert!(m.horizon() > 5);
    }
}
