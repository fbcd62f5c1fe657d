//! Stationary law of the `eta` chain by power iteration on a truncated
//! window of states.

use serde::{Deserialize, Serialize};

use super::kernel::EtaKernel;
use super::lattice::{Lattice1DDistribution, LatticeOffset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryOptions {
    /// Stop once `||v P - v||_1` falls below this.
    pub residual_target: f64,
    /// Largest tolerated stationary mass flowing out of the window per step.
    pub leakage_target: f64,
    pub max_iterations: usize,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        Self { residual_target: 1e-12, leakage_target: 1e-10, max_iterations: 2_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryResult {
    /// Law of `eta` on the window.
    pub nu: Lattice1DDistribution,
    /// Law of `r = eta + 1/2`.
    pub r_law: Lattice1DDistribution,
    pub mean: f64,
    /// Variance of `r`.
    pub sigma2: f64,
    pub window: (i64, i64),
    pub residual: f64,
    pub iterations: usize,
    /// `sum_eta nu(eta) * P(eta -> outside window)`.
    pub leakage: f64,
    /// `nu(lo) + nu(hi)`.
    pub boundary_mass: f64,
    /// Mean of `ln(nu(k+1) / nu(k))` over the upper tail where masses are
    /// representable; negative means decay.
    pub tail_log_ratio: f64,
}

impl StationaryResult {
    /// Stationary expectation of the one-step increment `eta' - eta`.
    pub fn mean_increment(&self, kernel: &EtaKernel) -> Result<f64> {
        let mut total = 0.0;
        for (state, p) in self.nu.iter() {
            let row = kernel.row(state)?;
            total += p * row.iter().map(|(next, q)| q * (next - state) as f64).sum::<f64>();
        }
        Ok(total)
    }
}

struct TruncatedKernel {
    lo: i64,
    /// Per state: first target index in the window and the renormalised masses.
    rows: Vec<(usize, Vec<f64>)>,
    leak: Vec<f64>,
}

impl TruncatedKernel {
    fn new(kernel: &EtaKernel, window: (i64, i64)) -> Result<Self> {
        let (lo, hi) = window;
        let mut rows = Vec::new();
        let mut leak = Vec::new();
        for state in lo..=hi {
            let row = kernel.row(state)?;
            let a = row.start.max(lo);
            let b = row.end().min(hi);
            let inside: Vec<f64> = (a..=b).map(|i| row.mass(i)).collect();
            let kept: f64 = inside.iter().sum();
            leak.push(1.0 - kept);
            rows.push(((a - lo) as usize, inside.into_iter().map(|p| p / kept).collect()));
        }
        Ok(Self { lo, rows, leak })
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (&mass, (first, row)) in v.iter().zip(&self.rows) {
            if mass == 0.0 {
                continue;
            }
            for (o, q) in out[*first..*first + row.len()].iter_mut().zip(row) {
                *o += mass * q;
            }
        }
    }
}

/// Pushes the law of `eta_j` forward one step on the window; shared with the
/// marginal tables used by the profile sampler.
pub(super) struct WindowPropagator(TruncatedKernel);

impl WindowPropagator {
    pub(super) fn new(kernel: &EtaKernel, window: (i64, i64)) -> Result<Self> {
        TruncatedKernel::new(kernel, window).map(Self)
    }

    pub(super) fn lo(&self) -> i64 {
        self.0.lo
    }

    pub(super) fn apply(&self, v: &[f64], out: &mut [f64]) {
        self.0.apply(v, out)
    }
}

pub fn stationary_distribution(
    kernel: &EtaKernel,
    window: (i64, i64),
    options: StationaryOptions,
) -> Result<StationaryResult> {
    let (lo, hi) = window;
    if lo > 0 || hi < 0 {
        return Err(Error::Precondition(format!("window [{lo}, {hi}] must contain 0")));
    }
    let truncated = TruncatedKernel::new(kernel, window)?;
    let n = (hi - lo + 1) as usize;
    let mut v = vec![0.0; n];
    v[(-lo) as usize] = 1.0;
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < options.max_iterations {
        truncated.apply(&v, &mut next);
        iterations += 1;
        residual = v.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut v, &mut next);
        if residual < options.residual_target {
            break;
        }
    }
    if residual >= options.residual_target {
        return Err(Error::NoConvergence { residual, iterations });
    }
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|p| *p /= total);
    let leakage: f64 = v.iter().zip(&truncated.leak).map(|(p, l)| p * l).sum();
    if leakage > options.leakage_target {
        return Err(Error::WindowTooSmall { leakage, target: options.leakage_target });
    }
    let nu = Lattice1DDistribution::new(LatticeOffset::Integer, lo, v);
    let r_law = nu.with_offset(LatticeOffset::Half);
    let tail_log_ratio = upper_tail_log_ratio(&nu.masses[(-lo) as usize..]);
    Ok(StationaryResult {
        mean: nu.mean(),
        sigma2: r_law.variance(),
        boundary_mass: nu.masses[0] + nu.masses[n - 1],
        r_law,
        window,
        residual,
        iterations,
        leakage,
        nu,
        tail_log_ratio,
    })
}

fn upper_tail_log_ratio(masses: &[f64]) -> f64 {
    let usable: Vec<f64> = masses.iter().copied().take_while(|&p| p > 1e-250).collect();
    if usable.len() < 3 {
        return f64::NAN;
    }
    let tail = &usable[usable.len() / 2..];
    let ratios: Vec<f64> = tail.windows(2).map(|p| (p[1] / p[0]).ln()).collect();
    ratios.iter().sum::<f64>() / ratios.len().max(1) as f64
}
