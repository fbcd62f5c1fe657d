//! Convolutions of approximate discrete Gaussians and the conditional-sum
//! lower bound built on them.
//!
//! The tail `Phi(x)` used here is the normalized one, `int_x^inf f(u) du`
//! with `f` the standard normal density, so `1 - Phi(M/4)` is a probability.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::bivariate::ConditionalLaw;
use crate::error::{Error, Result};
use crate::ray_knight::ScalingParams;

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `P(Z > x)` for a standard normal `Z`.
pub fn normal_upper_tail(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// A nonnegative sequence indexed by `k` in `Z`, zero outside storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenteredSeq {
    pub start: i64,
    pub values: Vec<f64>,
}

impl CenteredSeq {
    pub fn new(start: i64, values: Vec<f64>) -> Self {
        Self { start, values }
    }

    #[inline]
    pub fn get(&self, k: i64) -> f64 {
        let i = k - self.start;
        if i < 0 || i >= self.values.len() as i64 {
            0.0
        } else {
            self.values[i as usize]
        }
    }

    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    /// `k -> f(k / sigma) / sigma` on `|k| <= reach * sigma`.
    pub fn discrete_gaussian(sigma: f64, reach: f64) -> Self {
        let h = (reach * sigma).ceil() as i64;
        Self { start: -h, values: (-h..=h).map(|k| std_normal_pdf(k as f64 / sigma) / sigma).collect() }
    }

    /// `k -> P(S = k + center | Y = y)` where `center` is moved to the nearest
    /// point of the conditional lattice.
    pub fn from_conditional(law: &ConditionalLaw, center: f64) -> Self {
        let shift = (center - law.s_start).round();
        Self { start: -(shift as i64), values: law.masses.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma5Params {
    pub m: f64,
    pub eps: f64,
    pub sigma1: f64,
    pub sigma2: f64,
}

/// Worst ratio `seq_k / ((1 - eps) f(k/sigma) / sigma)` over `|k| <= M sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub sigma: f64,
    pub worst_ratio: f64,
    pub worst_k: i64,
}

impl HypothesisCheck {
    pub fn holds(&self) -> bool {
        self.worst_ratio >= 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionReport {
    pub params: Lemma5Params,
    pub xi: HypothesisCheck,
    pub zeta: HypothesisCheck,
    /// `(1 - eps)^3 (1 - Phi(M/4))`.
    pub constant: f64,
    pub z_max: i64,
    pub min_margin: f64,
    pub argmin_z: i64,
    /// `(z, convolution, bound)` for every checked `z`.
    pub margins: Vec<(i64, f64, f64)>,
}

fn check_hypothesis(seq: &CenteredSeq, sigma: f64, m: f64, eps: f64) -> HypothesisCheck {
    let h = (m * sigma).floor() as i64;
    let mut worst = HypothesisCheck { sigma, worst_ratio: f64::INFINITY, worst_k: 0 };
    for k in -h..=h {
        let floor = (1.0 - eps) * std_normal_pdf(k as f64 / sigma) / sigma;
        let ratio = seq.get(k) / floor;
        if ratio < worst.worst_ratio {
            worst.worst_ratio = ratio;
            worst.worst_k = k;
        }
    }
    worst
}

/// Checks the hypotheses of the discrete Gaussian convolution bound and,
/// if they hold, the margin
/// `sum_k xi_{z+k} zeta_{-k} - (1-eps)^3 (1 - Phi(M/4)) f(z/s)/s`,
/// `s = sqrt(sigma1^2 + sigma2^2)`, for every `|z| <= M sigma2 / 9`.
pub fn convolution_lowerbound_check(xi: &CenteredSeq, zeta: &CenteredSeq, p: Lemma5Params) -> Result<ConvolutionReport> {
    if !(p.m >= 1.0) || !(p.eps > 0.0 && p.eps < 1.0) || !(p.sigma1 > 0.0 && p.sigma1 <= p.sigma2) {
        return Err(Error::Precondition(format!(
            "need M >= 1, eps in (0,1), 0 < sigma1 <= sigma2; got {p:?}"
        )));
    }
    let hx = check_hypothesis(xi, p.sigma2, p.m, p.eps);
    let hz = check_hypothesis(zeta, p.sigma1, p.m, p.eps);
    for (name, h) in [("xi", hx), ("zeta", hz)] {
        if !h.holds() {
            return Err(Error::Precondition(format!(
                "{name} falls below the (1-eps) Gaussian floor at k = {} (ratio {:.6})",
                h.worst_k, h.worst_ratio
            )));
        }
    }
    let s = (p.sigma1 * p.sigma1 + p.sigma2 * p.sigma2).sqrt();
    let constant = (1.0 - p.eps).powi(3) * (1.0 - normal_upper_tail(p.m / 4.0));
    let z_max = (p.m * p.sigma2 / 9.0).floor() as i64;
    let mut margins = Vec::with_capacity((2 * z_max + 1) as usize);
    let (mut min_margin, mut argmin_z) = (f64::INFINITY, 0);
    for z in -z_max..=z_max {
        // k ranges where both factors are stored
        let lo = (xi.start - z).max(-zeta.end());
        let hi = (xi.end() - z).min(-zeta.start);
        let conv: f64 = (lo..=hi).map(|k| xi.get(z + k) * zeta.get(-k)).sum();
        let bound = constant * std_normal_pdf(z as f64 / s) / s;
        let margin = conv - bound;
        if margin < min_margin {
            min_margin = margin;
            argmin_z = z;
        }
        margins.push((z, conv, bound));
    }
    Ok(ConvolutionReport { params: p, xi: hx, zeta: hz, constant, z_max, min_margin, argmin_z, margins })
}

/// Smallest `sigma` on an increasing ladder from which the bound holds for
/// exact discrete Gaussians with `sigma1 = sigma2 = sigma` at every larger
/// rung. `None` if it fails at the top.
pub fn smallest_passing_sigma(ladder: &[f64], m: f64, eps: f64) -> Result<Option<f64>> {
    let mut passing = None;
    for &sigma in ladder.iter().rev() {
        let g = CenteredSeq::discrete_gaussian(sigma, m + 8.0);
        let p = Lemma5Params { m, eps, sigma1: sigma, sigma2: sigma };
        match convolution_lowerbound_check(&g, &g, p) {
            Ok(r) if r.min_margin >= 0.0 => passing = Some(sigma),
            Ok(_) | Err(Error::Precondition(_)) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(passing)
}

/// Lower bound for `P(S_1 + S_2 = b | Y_1 = a, Y_2 = a')`:
/// `2 / (sqrt(pi beta_n) n^{3/2}) [exp(-(4/beta_n)(a/(2 sqrt n) + a'/(2 N_x^{3/2}) - b/n^{3/2})^2) - eps]`.
pub fn cond_sum_lclt_bound(params: &ScalingParams, a: f64, a_prime: f64, b: f64, k: f64, eps: f64) -> Result<f64> {
    let n = params.n;
    let big_n = params.big_n_x;
    if !(big_n > 0.0) {
        return Err(Error::OutOfRange(format!("N_x = {big_n} must be positive")));
    }
    if a.abs() > k * n.sqrt() || a_prime.abs() > k * big_n.sqrt() || b.abs() > k / 9.0 * n.powf(1.5) {
        return Err(Error::OutOfRange(format!("(a, a', b) = ({a}, {a_prime}, {b}) outside the K = {k} box")));
    }
    let beta = params.beta_n;
    let t = a / (2.0 * n.sqrt()) + a_prime / (2.0 * big_n.powf(1.5)) - b / n.powf(1.5);
    let pref = 2.0 / ((std::f64::consts::PI * beta).sqrt() * n.powf(1.5));
    Ok(pref * ((-(4.0 / beta) * t * t).exp() - eps))
}
