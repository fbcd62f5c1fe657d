//! Acceptance suite: one PASS/FAIL line per criterion. Tolerances are
//! pinned here, independently of the expectations file.

mod common;

use std::time::{Duration, Instant};

use srrw::expectations::Expectations;
use srrw::harness::walks::prefix_endpoint_histograms;
use srrw::harness::{run_campaign, CampaignConfig, Growth, StatsReport, Suite};
use srrw::lclt::{
    compare_bivariate, conditional_sup_error, convolution_lowerbound_check, exact_bivariate_ladder, BivariateOptions,
    CenteredSeq, CrossTerm, Lemma5Params,
};
use srrw::par::Execution;
use srrw::ray_knight::{stationary_distribution, EtaKernel, StationaryOptions, DEFAULT_EPS_TAIL};
use srrw::stats::chi_square_gof;
use srrw::WeightFunction;

const WINDOW: (i64, i64) = (-40, 40);

struct Outcome {
    passed: bool,
    detail: String,
}

fn weight(spec: &str) -> WeightFunction {
    spec.parse().unwrap()
}

fn campaign(spec: &str, seed: u64, suite: Suite) -> StatsReport {
    let cfg = CampaignConfig::new(weight(spec), seed, suite);
    run_campaign(&cfg, &Expectations::builtin()).unwrap()
}

fn value(r: &StatsReport, check: &str) -> f64 {
    r.check(check).unwrap_or_else(|| panic!("missing check {check}")).value
}

fn column(r: &StatsReport, table: &str, col: &str) -> Vec<f64> {
    let t = r.table(table).unwrap();
    let i = t.columns.iter().position(|c| c == col).unwrap();
    t.rows.iter().map(|row| row[i]).collect()
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|p| p[1] < p[0])
}

fn exact_dynamics() -> Outcome {
    const P_MIN: f64 = 0.001;
    let k_max = 16;
    let mut worst = (1.0f64, String::new());
    for (spec, f) in [("exp:1", common::exp1 as common::Weight), ("ramp:1,1", common::ramp)] {
        let exact = common::endpoint_laws(f, k_max);
        let hists = prefix_endpoint_histograms(Execution::default(), &weight(spec), k_max as u64, 1_000_000, 101).unwrap();
        for (k, (law, hist)) in exact.iter().zip(&hists).enumerate() {
            let (mut obs, mut probs) = (Vec::new(), Vec::new());
            for (x, c) in hist.iter() {
                let p = law.get(&x).copied().unwrap_or(0.0);
                if p == 0.0 {
                    if c > 0 {
                        return Outcome { passed: false, detail: format!("{spec}: X({}) = {x} has probability 0", k + 1) };
                    }
                    continue;
                }
                obs.push(c);
                probs.push(p);
            }
            let gof = chi_square_gof(&obs, &probs).unwrap();
            if gof.p_value < worst.0 {
                worst = (gof.p_value, format!("{spec} k={}", k + 1));
            }
        }
    }
    Outcome { passed: worst.0 > P_MIN, detail: format!("min chi-square p = {:.4} ({}) > {P_MIN}", worst.0, worst.1) }
}

fn kernel_correctness() -> Outcome {
    const TV_MAX: f64 = 0.01;
    const MIN_TRANSITIONS: f64 = 1e6;
    let r = campaign("exp:0.1", 2, Suite::KernelExtraction { walks: 400, steps: 1_000_000, max_state: 5 });
    let (tv, fewest) = (value(&r, "max_tv"), value(&r, "min_transitions"));
    Outcome {
        passed: tv < TV_MAX && fewest >= MIN_TRANSITIONS,
        detail: format!("w = exp:0.1, max TV = {tv:.5} < {TV_MAX}, fewest transitions per state = {fewest} >= {MIN_TRANSITIONS}"),
    }
}

fn stationary_mean() -> Outcome {
    const MEAN_TOL: f64 = 1e-6;
    const SYMMETRY_TOL: f64 = 1e-8;
    let mut passed = true;
    let mut detail = Vec::new();
    for spec in ["exp:1", "ramp:1,1"] {
        let kernel = EtaKernel::new(&weight(spec), WINDOW, DEFAULT_EPS_TAIL).unwrap();
        let st = stationary_distribution(&kernel, WINDOW, StationaryOptions::default()).unwrap();
        let asym = st.r_law.asymmetry();
        passed &= (st.mean + 0.5).abs() < MEAN_TOL && asym < SYMMETRY_TOL;
        detail.push(format!("{spec}: |mean + 1/2| = {:.1e}, asymmetry = {asym:.1e}", (st.mean + 0.5).abs()));
    }
    Outcome { passed, detail: format!("{} (tol {MEAN_TOL:e}, {SYMMETRY_TOL:e})", detail.join("; ")) }
}

fn ray_knight_equivalence() -> Outcome {
    const TV_MAX: f64 = 0.01;
    let r = campaign("exp:1", 4, Suite::RkEquivalence { ms: vec![1, 2, 3], replicas: 1_000_000, reach: 3 });
    let tv = value(&r, "max_tv");
    let censored = value(&r, "direct_censored");
    Outcome { passed: tv < TV_MAX && censored == 0.0, detail: format!("m <= 3, |y| <= 3: max TV = {tv:.5} < {TV_MAX}, censored walks = {censored}") }
}

fn bivariate_and_conditional() -> (Outcome, Outcome) {
    const SUP_MAX: f64 = 0.05;
    const COND_MAX: f64 = 0.1;
    let kernel = EtaKernel::new(&weight("exp:1"), WINDOW, DEFAULT_EPS_TAIL).unwrap();
    let st = stationary_distribution(&kernel, WINDOW, StationaryOptions::default()).unwrap();
    let ladder = exact_bivariate_ladder(&st.r_law, &[50, 100, 200, 400], &BivariateOptions::default()).unwrap();
    let sup = |cross| -> Vec<f64> { ladder.iter().map(|p| compare_bivariate(p, 3.0, cross, None, 1).unwrap().sup_scaled_error).collect() };
    let minus = sup(CrossTerm::Minus);
    let plus = sup(CrossTerm::Plus);
    let five = Outcome {
        passed: minus[3] < SUP_MAX && strictly_decreasing(&minus) && !strictly_decreasing(&plus),
        detail: format!(
            "sup error {:?} at N = 50..400 (< {SUP_MAX} at 400, strictly decreasing); +3uv variant {:?} not monotone",
            minus.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(),
            plus.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>()
        ),
    };

    let pmf = &ladder[3];
    let n = 400f64;
    let cond = conditional_sup_error(pmf, 2.0 * n.sqrt(), 2.0 * n.powf(1.5), None).unwrap();
    let sigma = st.sigma2.sqrt() * n.powf(1.5) / 12f64.sqrt();
    let mut margin = f64::INFINITY;
    let mut hypotheses = true;
    for a in [0.0, 1.0, 10.0] {
        let law = pmf.conditional_s(a).unwrap();
        let seq = CenteredSeq::from_conditional(&law, a * n / 2.0);
        match convolution_lowerbound_check(&seq, &seq, Lemma5Params { m: 4.0, eps: 0.05, sigma1: sigma, sigma2: sigma }) {
            Ok(r) => margin = margin.min(r.min_margin),
            Err(_) => hypotheses = false,
        }
    }
    let six = Outcome {
        passed: cond.sup_scaled_error < COND_MAX && hypotheses && margin >= 0.0,
        detail: format!(
            "N = 400 conditional sup error = {:.4} < {COND_MAX}; convolution bound (M = 4, eps = 0.05, a in {{0, 1, 10}}): hypotheses hold = {hypotheses}, min margin = {margin:.3e} >= 0",
            cond.sup_scaled_error
        ),
    };
    (five, six)
}

fn endpoint_law() -> Outcome {
    const KS_MAX: f64 = 0.03;
    let r = campaign("exp:1", 7, Suite::EndpointLaw { ladder: vec![50, 100, 200], replicas: 100_000 });
    let ks = column(&r, "endpoint_law", "ks");
    Outcome {
        passed: ks[1] < KS_MAX && strictly_decreasing(&ks),
        detail: format!("KS at n = 50/100/200: {:.4} / {:.4} / {:.4} (< {KS_MAX} at 100, strictly decreasing)", ks[0], ks[1], ks[2]),
    }
}

fn local_clt() -> Outcome {
    const FLOOR: f64 = 0.8;
    let n = 60.0;
    let r = campaign("exp:1", 8, Suite::LocalClt { n: 60, replicas: 1_000_000, eps: 0.2 });
    let xs = column(&r, "local_clt", "x");
    let np = column(&r, "local_clt", "n_p");
    let min = xs.iter().zip(&np).filter(|(x, _)| x.abs() <= 0.8 * n).map(|(_, &p)| p).fold(f64::INFINITY, f64::min);
    Outcome { passed: min >= FLOOR, detail: format!("n = 60: min n P(X = x) over parity-correct |x| <= 48 is {min:.4} >= {FLOOR}") }
}

fn tail_suite() -> Outcome {
    const TOP_MAX: f64 = 0.01;
    let r = campaign("exp:1", 9, Suite::TailBounds { ladder: vec![1_000, 10_000, 100_000], replicas: 2000, growth: Growth::LogSquared });
    let mut passed = true;
    let mut parts = Vec::new();
    for e in ["rho", "lambda", "l_above", "l_below"] {
        let freq = column(&r, "tail_bounds", &format!("{e}_freq"));
        let upper = column(&r, "tail_bounds", &format!("{e}_upper"));
        let decreasing = r.check(&format!("{e}_decreasing")).unwrap().passed;
        passed &= decreasing && upper[2] < TOP_MAX;
        parts.push(format!("{e}: freq {freq:?}, top upper bound {:.4}", upper[2]));
    }
    Outcome { passed, detail: format!("{} (< {TOP_MAX}, non-increasing within 3 s.e.)", parts.join("; ")) }
}

fn inverse_time() -> Outcome {
    const RIEMANN_TOL: f64 = 0.01;
    const BAND: (f64, f64) = (0.7, 1.3);
    let r = campaign(
        "exp:1",
        10,
        Suite::InverseTime { n: 24, replicas: 10_000_000, c_ladder: vec![-1.0, -0.5, 0.0, 0.5, 1.0], riemann_n: 10_000, riemann_k: 6.0 },
    );
    let riemann = value(&r, "riemann_sum");
    let at0 = value(&r, "estimate_at_c0");
    let monotone = r.check("decreasing_in_abs_c").unwrap().passed;
    let cs = column(&r, "inverse_time", "c");
    let est = column(&r, "inverse_time", "estimate");
    let curve: Vec<String> = cs.iter().zip(&est).map(|(c, e)| format!("{c:+.3}:{e:.3}")).collect();
    Outcome {
        passed: (riemann - 1.0).abs() < RIEMANN_TOL && at0 >= BAND.0 && at0 <= BAND.1 && monotone,
        detail: format!(
            "Riemann sum at n = 1e4 = {riemann:.6}; n = 24 estimate at c = 0 is {at0:.4} in [{}, {}]; curve {} decreasing in |c| = {monotone}",
            BAND.0,
            BAND.1,
            curve.join(" ")
        ),
    }
}

fn determinism() -> Outcome {
    let suites = [
        Suite::EndpointLaw { ladder: vec![10, 20], replicas: 5000 },
        Suite::TailBounds { ladder: vec![50, 100], replicas: 300, growth: Growth::Log },
        Suite::RkEquivalence { ms: vec![2], replicas: 3000, reach: 2 },
    ];
    let tmp = std::env::temp_dir().join(format!("srrw-acceptance-{}", std::process::id()));
    let mut identical = true;
    let mut files = 0;
    for (i, suite) in suites.into_iter().enumerate() {
        let mut outputs = Vec::new();
        for threads in [1usize, 2, 5] {
            let cfg = CampaignConfig { threads, ..CampaignConfig::new(weight("exp:1"), 77, suite.clone()) };
            let dir = tmp.join(format!("{i}-{threads}"));
            let report = run_campaign(&cfg, &Expectations::builtin()).unwrap();
            let written = report.write_to(&dir).unwrap();
            outputs.push(written.iter().map(|p| std::fs::read(p).unwrap()).collect::<Vec<_>>());
        }
        files += outputs[0].len();
        identical &= outputs.windows(2).all(|p| p[0] == p[1]);
    }
    let _ = std::fs::remove_dir_all(&tmp);
    Outcome { passed: identical, detail: format!("{files} JSON/CSV files byte-identical across 1, 2 and 5 threads") }
}

fn timed<T>(run: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = run();
    (out, start.elapsed())
}

fn verdict(id: u32, name: &str, limit_min: u64, out: &Outcome, elapsed: Duration) -> bool {
    let ok = out.passed && elapsed < Duration::from_secs(60 * limit_min);
    println!(
        "{} criterion {id:>2} [{name}]: {} | runtime {:.1}s (limit {limit_min} min)",
        if ok { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64()
    );
    ok
}

fn main() {
    let mut passed = 0;
    let mut run = |id: u32, name: &str, limit_min: u64, f: fn() -> Outcome| {
        let (out, elapsed) = timed(f);
        passed += usize::from(verdict(id, name, limit_min, &out, elapsed));
    };
    run(1, "exact dynamics", 1, exact_dynamics);
    run(2, "kernel rows", 5, kernel_correctness);
    run(3, "stationary mean", 1, stationary_mean);
    run(4, "Ray-Knight equivalence", 10, ray_knight_equivalence);
    // 5 and 6 share one exact computation; each is charged its full cost.
    let ((five, six), elapsed) = timed(bivariate_and_conditional);
    let mut passed = passed + usize::from(verdict(5, "bivariate local CLT", 10, &five, elapsed));
    passed += usize::from(verdict(6, "conditional local CLT", 10, &six, elapsed));
    let mut run = |id: u32, name: &str, limit_min: u64, f: fn() -> Outcome| {
        let (out, elapsed) = timed(f);
        passed += usize::from(verdict(id, name, limit_min, &out, elapsed));
    };
    run(7, "endpoint law", 15, endpoint_law);
    run(8, "local limit at n = 60", 20, local_clt);
    run(9, "tail suite", 15, tail_suite);
    run(10, "inverse local time", 30, inverse_time);
    run(11, "determinism", 5, determinism);
    println!("acceptance: {passed} of 11 criteria passed");
    if passed < 11 {
        std::process::exit(1);
    }
}
