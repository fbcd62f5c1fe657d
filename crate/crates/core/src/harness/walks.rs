//! Reducers over directly simulated walks.

use crate::error::Result;
use crate::par::{try_fold_replicas, Execution};
use crate::ray_knight::theta;
use crate::rng::replica_rng;
use crate::stats::{ks_uniform_lattice, Histogram};
use crate::walk::{simulate_until_inverse_local_time, Direction, EtaTransitionTally, InverseLocalTimeRun, Walker};
use crate::weight::WeightFunction;

use super::profiles::ProfileLaw;

/// Histogram of `X(steps)` over `replicas` walks.
pub fn endpoint_histogram(exec: Execution, w: &WeightFunction, steps: u64, replicas: u64, seed: u64) -> Result<Histogram> {
    let walker = Walker::new(w)?;
    let len = 2 * steps as usize + 1;
    try_fold_replicas(
        exec,
        replicas,
        || walker.clone(),
        || Histogram::new(-(steps as i64), len),
        |walker, hist, r| {
            walker.reset();
            hist.add(walker.run(&mut replica_rng(seed, r), steps)?);
            Ok(())
        },
        |a, b| a.merge(&b),
    )
}

/// Histograms of `X(k)` for every `k = 1..=k_max`, from the same walks.
pub fn prefix_endpoint_histograms(
    exec: Execution,
    w: &WeightFunction,
    k_max: u64,
    replicas: u64,
    seed: u64,
) -> Result<Vec<Histogram>> {
    let walker = Walker::new(w)?;
    let len = 2 * k_max as usize + 1;
    try_fold_replicas(
        exec,
        replicas,
        || walker.clone(),
        || vec![Histogram::new(-(k_max as i64), len); k_max as usize],
        |walker, hists, r| {
            walker.reset();
            let mut rng = replica_rng(seed, r);
            for h in hists.iter_mut() {
                walker.step(&mut rng)?;
                h.add(walker.position());
            }
            Ok(())
        },
        |a, b| a.iter_mut().zip(&b).for_each(|(x, y)| x.merge(y)),
    )
}

/// KS distance of `X(n^2)/n` to `U(-1, 1)`, each lattice atom spread over
/// its parity cell of width `2/n`.
pub fn endpoint_ks(hist: &Histogram, n: u64) -> f64 {
    let nf = n as f64;
    let atoms: Vec<(f64, u64)> = hist.iter().filter(|&(x, _)| (x - hist.lo) % 2 == 0).map(|(x, c)| (x as f64 / nf, c)).collect();
    ks_uniform_lattice(&atoms, 2.0 / nf)
}

/// Histogram of `m` over the replicas with `T+_{x-1,m} = n^2`: the walk is
/// at `x` at time `n^2` and its last step came up from `x - 1`, so
/// `m = l+(n^2, x - 1)`. Replicas without such an `m` are not counted.
pub fn inverse_time_histogram(exec: Execution, w: &WeightFunction, n: u64, x: i64, replicas: u64, seed: u64) -> Result<Histogram> {
    let walker = Walker::new(w)?;
    let steps = n * n;
    try_fold_replicas(
        exec,
        replicas,
        || walker.clone(),
        || Histogram::new(0, steps as usize / 2 + 2),
        |walker, hist, r| {
            walker.reset();
            let mut rng = replica_rng(seed, r);
            walker.run(&mut rng, steps - 1)?;
            if walker.position() == x - 1 && walker.step(&mut rng)? == Direction::Plus {
                hist.add(walker.l_plus(x - 1) as i64);
            }
            Ok(())
        },
        |a, b| a.merge(&b),
    )
}

/// `sup_x |l+(k, x)/sqrt(k) - theta_1(|x|/sqrt(k))|`.
pub fn profile_deviation(walker: &Walker, k: u64) -> f64 {
    let root = (k as f64).sqrt();
    let (lo, hi) = walker.visited();
    let reach = root.ceil() as i64 + 1;
    let tent = |x: i64| if (x as f64).abs() < root { theta(1.0, x as f64 / root) } else { 0.0 };
    (lo.min(-reach)..=hi.max(reach)).map(|x| (walker.l_plus(x) as f64 / root - tent(x)).abs()).fold(0.0, f64::max)
}

/// Per-replica profile deviations at time `k`, in replica order.
pub fn profile_deviations(exec: Execution, w: &WeightFunction, k: u64, replicas: u64, seed: u64) -> Result<Vec<f64>> {
    let walker = Walker::new(w)?;
    try_fold_replicas(
        exec,
        replicas,
        || walker.clone(),
        Vec::new,
        |walker, out: &mut Vec<f64>, r| {
            walker.reset();
            walker.run(&mut replica_rng(seed, r), k)?;
            out.push(profile_deviation(walker, k));
            Ok(())
        },
        |a, mut b| a.append(&mut b),
    )
}

/// `eta` transitions tallied over `walks` independent walks of `steps` steps.
pub fn kernel_tally(
    exec: Execution,
    w: &WeightFunction,
    walks: u64,
    steps: u64,
    max_state: i64,
    width: usize,
    seed: u64,
) -> Result<EtaTransitionTally> {
    let walker = Walker::new(w)?;
    try_fold_replicas(
        exec,
        walks,
        || walker.clone(),
        || EtaTransitionTally::new(max_state, width),
        |walker, tally, r| tally.record_walk(walker, steps, &mut replica_rng(seed, r)),
        |a, b| a.merge(&b),
    )
}

/// Law of `y -> l+(T+_{0,m}, y)` for `|y| <= reach` from direct walks;
/// walks still short of `T+_{0,m}` after `max_steps` are counted as censored.
#[allow(clippy::too_many_arguments)]
pub fn direct_profile_law(
    exec: Execution,
    w: &WeightFunction,
    m: u64,
    reach: i64,
    cap: usize,
    replicas: u64,
    max_steps: u64,
    seed: u64,
) -> Result<ProfileLaw> {
    let walker = Walker::new(w)?;
    try_fold_replicas(
        exec,
        replicas,
        || walker.clone(),
        || ProfileLaw::new(reach, cap),
        |walker, law, r| {
            match simulate_until_inverse_local_time(walker, 0, m, &mut replica_rng(seed, r), max_steps)? {
                InverseLocalTimeRun::Reached { local_times, .. } => law.add(|y| local_times.plus(y)),
                InverseLocalTimeRun::Censored => law.censored += 1,
            }
            Ok(())
        },
        |a, b| a.merge(&b),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_is_fair() {
        let w = WeightFunction::exponential(1.0).unwrap();
        let h = &prefix_endpoint_histograms(Execution::Sequential, &w, 3, 4000, 5).unwrap()[0];
        assert_eq!(h.get(1) + h.get(-1), 4000);
        let p = h.get(1) as f64 / 4000.0;
        assert!((p - 0.5).abs() < 3.0 * (0.25f64 / 4000.0).sqrt());
    }

    #[test]
    fn endpoint_histogram_agrees_with_prefix() {
        let w = WeightFunction::linear_ramp(1.0, 1.0).unwrap();
        let a = endpoint_histogram(Execution::Sequential, &w, 9, 500, 3).unwrap();
        let b = prefix_endpoint_histograms(Execution::Sequential, &w, 9, 500, 3).unwrap();
        assert_eq!(a, b[8]);
    }

    #[test]
    fn deviation_vanishes_only_on_the_tent() {
        let w = WeightFunction::exponential(1.0).unwrap();
        let walker = Walker::new(&w).unwrap();
        // no local time at all: the sup is the tent's peak
        assert_eq!(profile_deviation(&walker, 100), 0.5);
    }

    #[test]
    fn ks_of_exact_uniform_lattice_is_zero() {
        // one atom per parity cell: the smoothed law is exactly U(-1, 1)
        let n = 10u64;
        let mut h = Histogram::new(-99, 199);
        for x in (-9..=9).step_by(2) {
            for _ in 0..7 {
                h.add(x);
            }
        }
        assert!(endpoint_ks(&h, n) < 1e-12);
    }
}
