//! Library results against independent brute-force oracles.

mod common;

use approx::assert_abs_diff_eq;
use srrw::harness::walks::prefix_endpoint_histograms;
use srrw::lclt::{exact_bivariate_pmf, BivariateOptions};
use srrw::par::Execution;
use srrw::ray_knight::{
    eta_kernel_row, stationary_distribution, theta, ChainIndexing, EtaKernel, Lattice1DDistribution, LatticeOffset,
    ProfileSampler, StationaryOptions, DEFAULT_EPS_TAIL,
};
use srrw::rng::replica_rng;
use srrw::stats::chi_square_gof;
use srrw::WeightFunction;

fn weight(spec: &str) -> WeightFunction {
    spec.parse().unwrap()
}

#[test]
fn kernel_rows_match_the_step_rule() {
    for (spec, f) in [("exp:1", common::exp1 as common::Weight), ("ramp:1,1", common::ramp), ("exp:0.1", common::exp01)] {
        let w = weight(spec);
        for eta in -6..=6 {
            let row = eta_kernel_row(&w, eta, DEFAULT_EPS_TAIL).unwrap();
            assert_eq!(row.start, eta - 1);
            let oracle = common::kernel_row(f, eta, row.masses.len());
            for (a, b) in row.masses.iter().zip(&oracle) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-14);
            }
        }
    }
}

#[test]
fn stationary_law_matches_power_iteration() {
    for (spec, f) in [("exp:1", common::exp1 as common::Weight), ("ramp:1,1", common::ramp)] {
        let kernel = EtaKernel::new(&weight(spec), (-40, 40), DEFAULT_EPS_TAIL).unwrap();
        let st = stationary_distribution(&kernel, (-40, 40), StationaryOptions::default()).unwrap();
        let oracle = common::stationary(f, -40, 40, 400);
        for (i, p) in st.nu.iter() {
            assert_abs_diff_eq!(p, oracle[(i + 40) as usize], epsilon = 1e-10);
        }
        let mean: f64 = oracle.iter().enumerate().map(|(k, p)| p * (k as f64 - 40.0)).sum();
        assert_abs_diff_eq!(mean, -0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(st.mean, -0.5, epsilon = 1e-9);
    }
}

const RAMP_SIGMA2: f64 = 1.831976706869327;
const EXP01_SIGMA2: f64 = 4.999999999999999;

#[test]
fn frozen_stationary_variances() {
    // Values computed by the power-iteration oracle above and frozen here.
    for (spec, f, frozen) in [
        ("exp:1", common::exp1 as common::Weight, 0.5010210803994488),
        ("ramp:1,1", common::ramp, RAMP_SIGMA2),
        ("exp:0.1", common::exp01, EXP01_SIGMA2),
    ] {
        let oracle = common::stationary(f, -40, 40, 4000);
        let mean: f64 = oracle.iter().enumerate().map(|(k, p)| p * (k as f64 - 40.0)).sum();
        let var: f64 = oracle.iter().enumerate().map(|(k, p)| p * (k as f64 - 40.0 - mean).powi(2)).sum();
        println!("{spec}: sigma2 = {var:.16}");
        assert_abs_diff_eq!(var, frozen, epsilon = 1e-9);
        let kernel = EtaKernel::new(&weight(spec), (-40, 40), DEFAULT_EPS_TAIL).unwrap();
        let st = stationary_distribution(&kernel, (-40, 40), StationaryOptions::default()).unwrap();
        assert_abs_diff_eq!(st.sigma2, frozen, epsilon = 1e-9);
    }
}

#[test]
fn simulated_endpoints_follow_the_enumerated_law() {
    let k_max = 12;
    for (spec, f) in [("exp:1", common::exp1 as common::Weight), ("ramp:1,1", common::ramp)] {
        let exact = common::endpoint_laws(f, k_max);
        let hists = prefix_endpoint_histograms(Execution::default(), &weight(spec), k_max as u64, 200_000, 17).unwrap();
        for (k, (law, hist)) in exact.iter().zip(&hists).enumerate() {
            let xs: Vec<i64> = (-(k as i64 + 1)..=k as i64 + 1).collect();
            let probs: Vec<f64> = xs.iter().map(|x| law.get(x).copied().unwrap_or(0.0)).collect();
            let obs: Vec<u64> = xs.iter().map(|&x| hist.get(x)).collect();
            let keep: Vec<usize> = (0..xs.len()).filter(|&i| probs[i] > 0.0).collect();
            assert!(keep.len() < xs.len() || k == 0 || obs.iter().all(|&c| c > 0));
            let gof = chi_square_gof(&keep.iter().map(|&i| obs[i]).collect::<Vec<_>>(), &keep.iter().map(|&i| probs[i]).collect::<Vec<_>>()).unwrap();
            assert!(gof.p_value > 1e-4, "{spec} k={}: {gof:?}", k + 1);
            // zero-probability sites are never visited
            assert!((0..xs.len()).filter(|&i| probs[i] == 0.0).all(|i| obs[i] == 0));
        }
    }
}

#[test]
fn ray_knight_profiles_follow_the_enumerated_law() {
    let reach = 2;
    for (m, depth) in [(1i64, 24usize)] {
        let (law, unfinished) = common::profile_law_at_inverse_time(common::exp1, m, reach, depth);
        assert!(unfinished < 0.05, "m={m}: unfinished mass {unfinished}");
        let sampler = ProfileSampler::new(&weight("exp:1"), ChainIndexing::Marginal).unwrap();
        let reps = 200_000u64;
        let mut rng = replica_rng(23, 0);
        let mut counts = std::collections::HashMap::<Vec<i64>, u64>::new();
        for _ in 0..reps {
            let t = sampler.sample(0, m as u64, &mut rng).unwrap();
            let key: Vec<i64> = (-reach..=reach).map(|y| t.plus(y) as i64).collect();
            *counts.entry(key).or_insert(0) += 1;
        }
        for (key, &p) in law.iter().filter(|(_, &p)| p > 1e-3) {
            let f = counts.get(key).copied().unwrap_or(0) as f64 / reps as f64;
            let se = (p * (1.0 - p) / reps as f64).sqrt();
            // paths longer than the depth can only add mass
            assert!(f >= p - 5.0 * se && f <= p + unfinished + 5.0 * se, "m={m} {key:?}: {f} vs {p}");
        }
    }
}

#[test]
fn two_point_bivariate_law_matches_enumeration() {
    let law = Lattice1DDistribution::new(LatticeOffset::Half, -1, vec![0.5, 0.5]);
    for n in [1usize, 2, 5, 10, 14] {
        let pmf = exact_bivariate_pmf(&law, n, &BivariateOptions { prune: 1e-300, ..Default::default() }).unwrap();
        let oracle = common::two_point_bivariate(n);
        let mut seen = 0.0;
        for (&(a, b), &p) in &oracle {
            assert_abs_diff_eq!(pmf.mass(a as f64 / 2.0, b as f64 / 2.0), p, epsilon = 1e-15);
            seen += p;
        }
        assert_abs_diff_eq!(seen, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pmf.total(), 1.0, epsilon = 1e-12);
    }
}

#[test]
fn triangular_profile_examples() {
    // theta_u(v) = (u/2)(1 - |v|/u)
    assert_eq!(theta(2.0, 0.0), 1.0);
    assert_eq!(theta(2.0, 1.0), 0.5);
    assert_eq!(theta(2.0, -1.0), 0.5);
    assert_eq!(theta(2.0, 2.0), 0.0);
}
