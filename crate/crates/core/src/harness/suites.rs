//! Campaign drivers: run the reducers on a ladder and turn the results
//! into tables and verdicts.

use super::config::{CampaignConfig, Growth, Suite};
use super::profiles::{boundary_sums, riemann_sum, rk_profile_law, tail_events, TailThresholds};
use super::report::{cells, Check, StatsReport, Table};
use super::walks::{direct_profile_law, endpoint_histogram, endpoint_ks, inverse_time_histogram, kernel_tally, profile_deviations};
use crate::error::{Error, Result};
use crate::expectations::Expectations;
use crate::par::Execution;
use crate::ray_knight::{scaling_params, stationary_distribution, ChainIndexing, EtaKernel, ProfileSampler, StationaryOptions, DEFAULT_EPS_TAIL};
use crate::rng::derive_seed;
use crate::stats::{non_increasing, quantile, total_variation, upper_bound, Estimate};
use crate::walk::Direction;
use crate::weight::WeightFunction;

/// Window for kernels and stationary laws used by the campaigns.
pub const WINDOW: (i64, i64) = (-40, 40);

/// Largest local time tabulated in the profile laws.
const PROFILE_CAP: usize = 64;

/// Step cap for direct walks run until an inverse local time.
const DIRECT_MAX_STEPS: u64 = 100_000_000;

/// Width of the `eta` jump tally.
const TALLY_WIDTH: usize = 128;

/// Runs the campaign described by `cfg`.
pub fn run_campaign(cfg: &CampaignConfig, exp: &Expectations) -> Result<StatsReport> {
    cfg.validate()?;
    match &cfg.suite {
        Suite::EndpointLaw { .. } => endpoint_law(cfg, exp),
        Suite::LocalClt { .. } => local_clt_table(cfg, exp),
        Suite::ProfileShape { .. } => profile_shape(cfg, exp),
        Suite::TailBounds { .. } => tail_bounds_suite(cfg, exp),
        Suite::InverseTime { .. } => inverse_time_asymptotics(cfg, exp),
        Suite::WBoundary { .. } => w_boundary_terms(cfg, exp),
        Suite::KernelExtraction { .. } => kernel_extraction(cfg, exp),
        Suite::RkEquivalence { .. } => rk_equivalence(cfg, exp),
    }
}

fn report(cfg: &CampaignConfig) -> StatsReport {
    StatsReport::new(cfg.suite.name(), cfg.weight.to_string(), cfg.seed, cfg.suite.replicas())
}

fn wrong_suite(name: &str) -> Error {
    Error::Config(format!("configuration is not a {name} campaign"))
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|p| p[1] < p[0])
}

/// Variance of `r` under the stationary law of `w`.
pub fn stationary_sigma2(w: &WeightFunction) -> Result<f64> {
    let kernel = EtaKernel::new(w, WINDOW, DEFAULT_EPS_TAIL)?;
    Ok(stationary_distribution(&kernel, WINDOW, StationaryOptions::default())?.sigma2)
}

pub fn endpoint_law(cfg: &CampaignConfig, exp: &Expectations) -> Result<StatsReport> {
    let Suite::EndpointLaw { ladder, replicas } = &cfg.suite else { return Err(wrong_suite("endpoint-law")) };
    let exec = cfg.execution();
    let mut out = report(cfg);
    let mut summary = Table::new("endpoint_law", &["n", "replicas", "ks", "mean", "mean_se"]);
    let mut hist_table = Table::new("endpoint_histogram", &["n", "x", "count"]);
    let mut ks = Vec::new();
    let mut centred = true;
    for &n in ladder {
        let hist = endpoint_histogram(exec, &cfg.weight, n * n, *replicas, derive_seed(cfg.seed, n))?;
        let d = endpoint_ks(&hist, n);
        let (mut s, mut s2) = (0.0, 0.0);
        for (x, c) in hist.iter().filter(|&(_, c)| c > 0) {
            let u = x as f64 / n as f64;
            s += c as f64 * u;
            s2 += c as f64 * u * u;
            hist_table.push(vec![n as f64, x as f64, c as f64]);
        }
        let mean = Estimate::mean(s, s2, *replicas);
        centred &= mean.within(0.0, exp.z);
        summary.push(vec![n as f64, *replicas as f64, d, mean.value, mean.se]);
        ks.push(d);
    }
    if let Some(i) = ladder.iter().position(|&n| n == exp.endpoint_law.reference_n) {
        out.checks.push(Check::below(&format!("ks_at_n{}", ladder[i]), ks[i], exp.endpoint_law.ks_max));
    }
    if ks.len() > 1 {
        out.checks.push(Check::new("ks_decreasing", ks[ks.len() - 1], "strictly decreasing along the ladder", strictly_decreasing(&ks)));
    }
    out.checks.push(Check::new("mean_centred", f64::from(u8::from(centred)), format!("|mean| <= {} s.e.", exp.z), centred));
    out.tables.push(summary);
    out.tables.push(hist_table);
    Ok(out)
}

pub fn local_clt_table(cfg: &CampaignConfig, exp: &Expectations) -> Result<StatsReport> {
    let Suite::LocalClt { n, replicas, eps } = &cfg.suite else { return Err(wrong_suite("local-clt")) };
    let (n, replicas) = (*n, *replicas);
    let hist = endpoint_histogram(cfg.execution(), &cfg.weight, n * n, replicas, derive_seed(cfg.seed, n))?;
    let nf = n as f64;
    let grid = (nf - nf.powf(cfg.alpha)).floor() as i64;
    let judged = (exp.local_clt.reach * nf).floor() as i64;
    let parity = ((n * n) % 2) as i64;
    let mut out = report(cfg);
    let span = grid.max(judged);
    let mut table = Table::new("local_clt", &["x", "hits", "n_p", "se", "in_grid", "below_1_minus_eps", "under_sampled"]);
    let (mut lo, mut hi, mut mass) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    let mut sparse = 0;
    for x in -span..=span {
        if (x - parity).rem_euclid(2) != 0 {
            continue;
        }
        let hits = hist.get(x);
        let e = Estimate::proportion(hits, replicas).scaled(nf);
        mass += hits as f64 / replicas as f64;
        let under = hits < exp.local_clt.min_hits;
        sparse += usize::from(under);
        let flag = |b: bool| f64::from(u8::from(b));
        table.push(vec![x as f64, hits as f64, e.value, e.se, flag(x.abs() <= grid), flag(e.value < 1.0 - eps), flag(under)]);
        if x.abs() <= judged && !under {
            lo = lo.min(e.value);
            hi = hi.max(e.value);
        }
    }
    out.checks.push(Check::new("grid_mass", mass, "<= 1", mass <= 1.0 + 1e-12));
    out.checks.push(Check::at_least("min_n_p", lo, exp.local_clt.floor));
    out.checks.push(Check::new("max_n_p", hi, format!("<= {}", exp.local_clt.ceiling), hi <= exp.local_clt.ceiling));
    out.notes.push(format!("parity grid |x| <= n - n^alpha = {grid}, x = n^2 mod 2; checks on |x| <= {judged}; {sparse} cells under-sampled"));
    out.tables.push(table);
    Ok(out)
}

pub fn profile_shape(cfg: &CampaignConfig, exp: &Expectations) -> Result<StatsReport> {
    let Suite::ProfileShape { ladder, replicas } = &cfg.suite else { return Err(wrong_suite("profile-shape")) };
    let mut out = report(cfg);
    let mut table = Table::new("profile_shape", &["k", "replicas", "median", "p95", "mean", "mean_se"]);
    let mut medians = Vec::new();
    let mut nonneg = true;
    for &k in ladder {
        let dev = profile_deviations(cfg.execution(), &cfg.weight, k, *replicas, derive_seed(cfg.seed, k))?;
        nonneg &= dev.iter().all(|&d| d >= 0.0);
        let mean = Estimate::mean(dev.iter().sum(), dev.iter().map(|d| d * d).sum(), dev.len() as u64);
        let med = quantile(&dev, 0.5);
        table.push(vec![k as f64, *replicas as f64, med, quantile(&dev, 0.95), mean.value, mean.se]);
        medians.push(med);
    }
    out.checks.push(Check::new("deviation_nonnegative", 0.0, ">= 0", nonneg));
    out.checks.push(Check::new("median_decreasing", *medians.last().unwrap(), "strictly decreasing along the ladder", strictly_decreasing(&medians)));
    out.notes.push(format!("deviation uses the tent theta_1(|x|/sqrt k); bands at {} s.e. where applicable", exp.z));
    out.tables.push(table);
    Ok(out)
}

fn profile_sampler(w: &WeightFunction) -> Result<ProfileSampler> {
    ProfileSampler::new(w, ChainIndexing::Marginal)
}

pub fn tail_bounds_suite(cfg: &CampaignConfig, exp: &Expectations) -> Result<StatsReport> {
    let Suite::TailBounds { ladder, replicas, growth } = &cfg.suite else { return Err(wrong_suite("tail-bounds")) };
    let sampler = profile_sampler(&cfg.weight)?;
    let mut out = report(cfg);
    let names = ["rho", "lambda", "l_above", "l_below"];
    let mut columns = vec!["m".to_string(), "replicas".into(), "range".into(), "edge".into()];
    for e in names {
        columns.extend([format!("{e}_hits"), format!("{e}_freq"), format!("{e}_se"), format!("{e}_upper")]);
    }
    let mut table = Table { name: "tail_bounds".into(), columns, rows: Vec::new() };
    let mut series: [Vec<Estimate>; 4] = Default::default();
    let mut tops = [0.0; 4];
    for &m in ladder {
        let t = tail_events(cfg.execution(), &sampler, m, *growth, *replicas, derive_seed(cfg.seed, m))?;
        let th = TailThresholds::new(m, *growth);
        let mut row = vec![m as f64, t.replicas as f64, th.range, th.edge as f64];
        for (k, hits) in [t.rho, t.lambda, t.l_above, t.l_below].into_iter().enumerate() {
            let e = Estimate::proportion(hits, t.replicas);
            let ub = upper_bound(hits, t.replicas, exp.alpha);
            row.extend([hits as f64, e.value, e.se, ub]);
            series[k].push(e);
            tops[k] = ub;
        }
        table.push(row);
    }
    for (k, e) in names.iter().enumerate() {
        out.checks.push(Check::new(
            &format!("{e}_decreasing"),
            series[k].last().unwrap().value,
            format!("non-increasing within {} s.e.", exp.z),
            non_increasing(&series[k], exp.z),
        ));
        out.checks.push(Check::below(&format!("{e}_top_upper_bound"), tops[k], exp.tail_bounds.top_max));
    }
    let g = match growth {
        Growth::LogSquared => "ln(m)^2",
        Growth::Log => "ln(m)",
    };
    out.notes.push(format!("g(m) = {g}; profiles from the Ray-Knight sampler at T+_(0,m)"));
    out.notes.push(format!("upper bounds are one-sided at level {} (exact for zero hits)", exp.alpha));
    out.tables.push(table);
    Ok(out)
}

pub fn inverse_time_asymptotics(cfg: &CampaignConfig, exp: &Expectations) -> Result<StatsReport> {
    let Suite::InverseTime { n, replicas, c_ladder, riemann_n, riemann_k } = &cfg.suite else {
        return Err(wrong_suite("inverse-time"));
    };
    let (n, replicas) = (*n, *replicas);
    let sigma2 = stationary_sigma2(&cfg.weight)?;
    let nf = n as f64;
    let base = scaling_params(nf, 0, 0.0, cfg.alpha, sigma2)?;
    let hist = inverse_time_histogram(cfg.execution(), &cfg.weight, n, 0, replicas, derive_seed(cfg.seed, n))?;
    let scale = (base.beta_n * std::f64::consts::PI).sqrt() * nf.powf(1.5);
    let mut out = report(cfg);
    let mut table = Table::new("inverse_time", &["c_requested", "m", "c", "hits", "estimate", "se", "gaussian"]);
    let mut points: Vec<(f64, Estimate)> = Vec::new();
    for &c in c_ladder {
        let m = (base.theta_n_x + c * nf.sqrt()).round().max(1.0);
        let realised = (m - base.theta_n_x) / nf.sqrt();
        let hits = hist.get(m as i64);
        let e = Estimate::proportion(hits, replicas).scaled(scale);
        table.push(vec![c, m, realised, hits as f64, e.value, e.se, (-4.0 * realised * realised / base.beta_n).exp()]);
        if !points.iter().any(|p| p.0 == realised) {
            points.push((realised, e));
        }
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let riemann = riemann_sum(*riemann_n as f64, scaling_params(*riemann_n as f64, 0, 0.0, cfg.alpha, sigma2)?.beta_n, *riemann_k);
    out.checks.push(Check::new(
        "riemann_sum",
        riemann,
        format!("|sum - 1| < {}", exp.inverse_time.riemann_tol),
        (riemann - 1.0).abs() < exp.inverse_time.riemann_tol,
    ));
    if let Some((_, e)) = points.iter().find(|p| p.0 == 0.0) {
        let (lo, hi) = (exp.inverse_time.band_lo, exp.inverse_time.band_hi);
        out.checks.push(Check::new("estimate_at_c0", e.value, format!("in [{lo}, {hi}]"), e.value >= lo && e.value <= hi));
    }
    // Both sides of c = 0, ordered by |c|.
    let right: Vec<f64> = points.iter().filter(|p| p.0 >= 0.0).map(|p| p.1.value).collect();
    let left: Vec<f64> = points.iter().rev().filter(|p| p.0 <= 0.0).map(|p| p.1.value).collect();
    let monotone = strictly_decreasing(&right) && strictly_decreasing(&left);
    out.checks.push(Check::new("decreasing_in_abs_c", f64::from(u8::from(monotone)), "strictly decreasing in |c| on each side", monotone));
    out.notes.push(format!(
        "estimate sqrt(beta pi) n^1.5 P(T+_(-1,m) = n^2) with theta_n(0) = {}, beta_n = {}, sigma2 = {sigma2}; c is the realised (m - theta)/sqrt(n)",
        base.theta_n_x, base.beta_n
    ));
    out.tables.push(table);
    Ok(out)
}

pub fn w_boundary_terms(cfg: &CampaignConfig, exp: &Expectations) -> Result<StatsReport> {
    let Suite::WBoundary { ladder, replicas, c, big_m } = &cfg.suite else { return Err(wrong_suite("w-boundary")) };
    let sigma2 = stationary_sigma2(&cfg.weight)?;
    let sampler = profile_sampler(&cfg.weight)?;
    let mut out = report(cfg);
    let mut table = Table::new(
        "w_boundary",
        &["n", "m", "threshold", "w1_freq", "w1_se", "w1_upper", "w2_freq", "w2_se", "w2_upper", "w1_mean", "w1_mean_se", "w2_mean", "w2_mean_se"],
    );
    let (mut w1s, mut w2s) = (Vec::new(), Vec::new());
    let mut agree = true;
    for &n in ladder {
        let nf = n as f64;
        let params = scaling_params(nf, 0, *c, cfg.alpha, sigma2)?;
        let m = params.level().round().max(1.0) as u64;
        let threshold = big_m * nf * nf.ln().powi(3);
        let b = boundary_sums(cfg.execution(), &sampler, nf, 0, m, threshold, *replicas, derive_seed(cfg.seed, n))?;
        let f1 = Estimate::proportion(b.w1_exceed, b.replicas);
        let f2 = Estimate::proportion(b.w2_exceed, b.replicas);
        let m1 = Estimate::mean(b.w1_sum, b.w1_sq, b.replicas);
        let m2 = Estimate::mean(b.w2_sum, b.w2_sq, b.replicas);
        let mut row = vec![nf, m as f64, threshold];
        row.extend(cells(f1).into_iter().take(2));
        row.push(upper_bound(b.w1_exceed, b.replicas, exp.alpha));
        row.extend(cells(f2).into_iter().take(2));
        row.push(upper_bound(b.w2_exceed, b.replicas, exp.alpha));
        row.extend([m1.value, m1.se, m2.value, m2.se]);
        table.push(row);
        agree &= (f1.value - f2.value).abs() <= exp.z * (f1.se.powi(2) + f2.se.powi(2)).sqrt();
        w1s.push(f1);
        w2s.push(f2);
    }
    for (name, s) in [("w1_decreasing", &w1s), ("w2_decreasing", &w2s)] {
        out.checks.push(Check::new(name, s.last().unwrap().value, format!("non-increasing within {} s.e.", exp.z), non_increasing(s, exp.z)));
    }
    if *c == 0.0 {
        out.checks.push(Check::new("w1_w2_agree", f64::from(u8::from(agree)), format!("within {} s.e.", exp.z), agree));
    }
    out.notes.push(format!("threshold M n ln(n)^3 with M = {big_m}; profiles at T+_(0,m), m = round(theta_n(0) + c sqrt(n))"));
    out.tables.push(table);
    Ok(out)
}

pub fn kernel_extraction(cfg: &CampaignConfig, exp: &Expectations) -> Result<StatsReport> {
    let Suite::KernelExtraction { walks, steps, max_state } = &cfg.suite else { return Err(wrong_suite("kernel-extraction")) };
    let tally = kernel_tally(cfg.execution(), &cfg.weight, *walks, *steps, *max_state, TALLY_WIDTH, cfg.seed)?;
    let kernel = EtaKernel::new(&cfg.weight, WINDOW, DEFAULT_EPS_TAIL)?;
    let mut out = report(cfg);
    let mut table = Table::new("kernel_extraction", &["direction", "state", "transitions", "tv"]);
    let (mut worst, mut fewest) = (0.0f64, u64::MAX);
    for (sign, dir) in [(1.0, Direction::Plus), (-1.0, Direction::Minus)] {
        for state in -max_state..=*max_state {
            let row = kernel.row(state)?;
            let (counts, overflow) = tally.row(dir, state);
            let total = tally.row_total(dir, state);
            let mut observed: Vec<f64> = counts.iter().map(|&c| c as f64 / total.max(1) as f64).collect();
            observed.push(overflow as f64 / total.max(1) as f64);
            let mut expected: Vec<f64> = (0..TALLY_WIDTH as i64).map(|l| row.mass(state - 1 + l)).collect();
            expected.push((1.0 - expected.iter().sum::<f64>()).max(0.0));
            let tv = total_variation(&observed, &expected);
            worst = worst.max(tv);
            fewest = fewest.min(total);
            table.push(vec![sign, state as f64, total as f64, tv]);
        }
    }
    out.checks.push(Check::below("max_tv", worst, exp.kernel.tv_max));
    out.checks.push(Check::at_least("min_transitions", fewest as f64, exp.kernel.min_transitions as f64));
    out.notes.push(format!("{walks} walks of {steps} steps; every eta+ and eta- transition at every site is tallied"));
    out.tables.push(table);
    Ok(out)
}

pub fn rk_equivalence(cfg: &CampaignConfig, exp: &Expectations) -> Result<StatsReport> {
    let Suite::RkEquivalence { ms, replicas, reach } = &cfg.suite else { return Err(wrong_suite("rk-equivalence")) };
    let sampler = profile_sampler(&cfg.weight)?;
    let exec: Execution = cfg.execution();
    let mut out = report(cfg);
    let mut table = Table::new("rk_equivalence", &["m", "y", "tv", "direct_recorded", "direct_censored", "rk_recorded"]);
    let mut worst = 0.0f64;
    let mut censored = 0;
    for &m in ms {
        let direct = direct_profile_law(exec, &cfg.weight, m, *reach, PROFILE_CAP, *replicas, DIRECT_MAX_STEPS, derive_seed(cfg.seed, 2 * m))?;
        let rk = rk_profile_law(exec, &sampler, m, *reach, PROFILE_CAP, *replicas, derive_seed(cfg.seed, 2 * m + 1))?;
        censored += direct.censored;
        for (y, tv) in direct.total_variation(&rk) {
            worst = worst.max(tv);
            table.push(vec![m as f64, y as f64, tv, direct.recorded() as f64, direct.censored as f64, rk.recorded() as f64]);
        }
    }
    out.checks.push(Check::below("max_tv", worst, exp.rk_equivalence.tv_max));
    out.checks.push(Check::new("direct_censored", censored as f64, "== 0", censored == 0));
    out.tables.push(table);
    Ok(out)
}
