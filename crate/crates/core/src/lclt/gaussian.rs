//! Gaussian predictions for the bivariate and conditional local limits and
//! their comparison against the exact DP.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::bivariate::BivariatePMF;
use crate::error::{Error, Result};

/// Sign of the `uv` cross term in the Gaussian exponent.
///
/// `Minus` is the inverse covariance of `(N^{-1/2} sum xi, N^{-3/2} sum j xi)`
/// and is the only correct choice. `Plus` exists for regression tests.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossTerm {
    #[default]
    Minus,
    Plus,
}

impl CrossTerm {
    fn sign(self) -> f64 {
        match self {
            Self::Minus => -1.0,
            Self::Plus => 1.0,
        }
    }
}

/// `exp(-(2/sigma^2)(u^2 + 3v^2 -/+ 3uv))`.
pub fn scaled_bivariate_kernel(sigma2: f64, u: f64, v: f64, cross: CrossTerm) -> f64 {
    (-(2.0 / sigma2) * (u * u + 3.0 * v * v + cross.sign() * 3.0 * u * v)).exp()
}

/// Predicted `P(Y = a, S = b)` for `n_x` summands:
/// `sqrt(12) / (2 pi sigma^2 n_x^2) exp(-(2/sigma^2)(a^2/n_x + 3b^2/n_x^3 - 3ab/n_x^2))`.
pub fn gaussian_bivariate_predicted(sigma2: f64, n_x: f64, a: f64, b: f64) -> f64 {
    gaussian_bivariate_predicted_with(sigma2, n_x, a, b, CrossTerm::Minus)
}

pub fn gaussian_bivariate_predicted_with(sigma2: f64, n_x: f64, a: f64, b: f64, cross: CrossTerm) -> f64 {
    let pref = 12f64.sqrt() / (2.0 * PI * sigma2 * n_x * n_x);
    pref * scaled_bivariate_kernel(sigma2, a / n_x.sqrt(), b / n_x.powf(1.5), cross)
}

/// Predicted `P(S = b | Y = a)`:
/// `sqrt(12) / (sqrt(2 pi) sigma n_x^{3/2}) exp(-(6/sigma^2)(a/(2 sqrt n_x) - b/n_x^{3/2})^2)`.
pub fn conditional_predicted(sigma2: f64, n_x: f64, a: f64, b: f64) -> f64 {
    conditional_scale(sigma2, n_x).recip() * conditional_kernel(sigma2, n_x, a, b)
}

fn conditional_kernel(sigma2: f64, n_x: f64, a: f64, b: f64) -> f64 {
    let t = a / (2.0 * n_x.sqrt()) - b / n_x.powf(1.5);
    (-(6.0 / sigma2) * t * t).exp()
}

/// `sqrt(2 pi) sigma n_x^{3/2} / sqrt(12)`, which turns conditional masses into
/// order-one quantities.
pub fn conditional_scale(sigma2: f64, n_x: f64) -> f64 {
    (2.0 * PI).sqrt() * sigma2.sqrt() * n_x.powf(1.5) / 12f64.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub u: f64,
    pub v: f64,
    pub exact: f64,
    pub predicted: f64,
    pub scaled_error: f64,
}

/// Exact vs Gaussian on the lattice points of a box in scaled coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianComparison {
    pub n: usize,
    pub sigma2: f64,
    pub cross: CrossTerm,
    pub half_width: f64,
    /// Lattice points examined (the whole box, not just stored cells).
    pub lattice_points: u64,
    pub sup_scaled_error: f64,
    pub argsup: (f64, f64),
    pub pruned_mass: f64,
    /// Decimated grid for CSV output.
    pub grid: Vec<GridPoint>,
}

pub const COMPARISON_CSV_HEADER: &str = "u,v,exact,predicted,scaled_error";

impl GaussianComparison {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(COMPARISON_CSV_HEADER);
        out.push('\n');
        for p in &self.grid {
            let _ = writeln!(out, "{},{},{:e},{:e},{:e}", p.u, p.v, p.exact, p.predicted, p.scaled_error);
        }
        out
    }
}

/// Values of `shift + Z` inside `[-h, h]`.
fn lattice_in(shift: f64, h: f64) -> impl Iterator<Item = f64> {
    let lo = (-h - shift).ceil() as i64;
    let hi = (h - shift).floor() as i64;
    (lo..=hi).map(move |k| k as f64 + shift)
}

/// Sup over `|u|, |v| <= half_width` on `L_N` of
/// `|(pi sigma^2 / sqrt 3) N^2 P - exp(-(2/sigma^2)(u^2 + 3v^2 -/+ 3uv))|`.
/// `sigma2` defaults to the variance of the step law.
pub fn compare_bivariate(
    pmf: &BivariatePMF,
    half_width: f64,
    cross: CrossTerm,
    sigma2: Option<f64>,
    grid_side: usize,
) -> Result<GaussianComparison> {
    if !(half_width > 0.0) {
        return Err(Error::Precondition("box half width must be positive".into()));
    }
    let n = pmf.n() as f64;
    let sigma2 = sigma2.unwrap_or_else(|| pmf.step_law().variance());
    let scale = PI * sigma2 / 3f64.sqrt() * n * n;
    let (sy, ss) = (n.sqrt(), n.powf(1.5));
    let ys: Vec<f64> = lattice_in(pmf.y_shift().rem_euclid(1.0), half_width * sy).collect();
    let s_vals: Vec<f64> = lattice_in(pmf.s_shift().rem_euclid(1.0), half_width * ss).collect();
    let ystride = ys.len().div_ceil(grid_side.max(1)).max(1);
    let sstride = s_vals.len().div_ceil(grid_side.max(1)).max(1);

    let mut sup = 0.0f64;
    let mut argsup = (0.0, 0.0);
    let mut grid = Vec::new();
    let mut points = 0u64;
    for (iy, &y) in ys.iter().enumerate() {
        let row = pmf.conditional_s(y).ok();
        let u = y / sy;
        for (is, &s) in s_vals.iter().enumerate() {
            let exact = row.as_ref().map_or(0.0, |r| r.get(s) * r.marginal);
            let v = s / ss;
            let kernel = scaled_bivariate_kernel(sigma2, u, v, cross);
            let err = (scale * exact - kernel).abs();
            points += 1;
            if err > sup {
                sup = err;
                argsup = (u, v);
            }
            if iy % ystride == 0 && is % sstride == 0 {
                grid.push(GridPoint { u, v, exact, predicted: kernel / scale, scaled_error: err });
            }
        }
    }
    Ok(GaussianComparison {
        n: pmf.n(),
        sigma2,
        cross,
        half_width,
        lattice_points: points,
        sup_scaled_error: sup,
        argsup,
        pruned_mass: pmf.pruned_mass(),
        grid,
    })
}

/// [`compare_bivariate`] after running the DP.
pub fn lclt_sup_error(
    step_law: &crate::ray_knight::Lattice1DDistribution,
    n: usize,
    half_width: f64,
    cross: CrossTerm,
) -> Result<GaussianComparison> {
    let pmf = super::exact_bivariate_pmf(step_law, n, &Default::default())?;
    compare_bivariate(&pmf, half_width, cross, None, 101)
}

/// One conditioning value `a` with its exact and predicted laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalCheck {
    pub a: f64,
    pub n_x: f64,
    pub sigma2: f64,
    /// `(b, exact, predicted)` over the stored support of the row.
    pub points: Vec<(f64, f64, f64)>,
}

impl ConditionalCheck {
    pub fn exact_total(&self) -> f64 {
        self.points.iter().map(|p| p.1).sum()
    }

    /// Largest scaled gap over the points with `|b| <= b_max`.
    pub fn sup_scaled_error(&self, b_max: f64) -> (f64, f64) {
        let scale = conditional_scale(self.sigma2, self.n_x);
        self.points
            .iter()
            .filter(|p| p.0.abs() <= b_max)
            .map(|&(b, e, q)| ((scale * (e - q)).abs(), b))
            .fold((0.0, 0.0), |acc, x| if x.0 > acc.0 { x } else { acc })
    }
}

/// Exact `P(S = b | Y = a)` paired with the prediction, with `n_x = N`.
pub fn conditional_lclt_check(pmf: &BivariatePMF, a: f64, sigma2: Option<f64>) -> Result<ConditionalCheck> {
    let n_x = pmf.n() as f64;
    let sigma2 = sigma2.unwrap_or_else(|| pmf.step_law().variance());
    let law = pmf.conditional_s(a)?;
    let points = law.iter().map(|(b, p)| (b, p, conditional_predicted(sigma2, n_x, a, b))).collect();
    Ok(ConditionalCheck { a, n_x, sigma2, points })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalComparison {
    pub n: usize,
    pub a_max: f64,
    pub b_max: f64,
    pub rows: usize,
    pub lattice_points: u64,
    pub sup_scaled_error: f64,
    pub argsup: (f64, f64),
}

/// Sup of the scaled conditional error over `|a| <= a_max` with positive
/// mass and every lattice `|b| <= b_max`.
pub fn conditional_sup_error(
    pmf: &BivariatePMF,
    a_max: f64,
    b_max: f64,
    sigma2: Option<f64>,
) -> Result<ConditionalComparison> {
    let n_x = pmf.n() as f64;
    let sigma2 = sigma2.unwrap_or_else(|| pmf.step_law().variance());
    let scale = conditional_scale(sigma2, n_x);
    let mut out = ConditionalComparison {
        n: pmf.n(),
        a_max,
        b_max,
        rows: 0,
        lattice_points: 0,
        sup_scaled_error: 0.0,
        argsup: (0.0, 0.0),
    };
    let b_vals: Vec<f64> = lattice_in(pmf.s_shift().rem_euclid(1.0), b_max).collect();
    for a in lattice_in(pmf.y_shift().rem_euclid(1.0), a_max) {
        let Ok(law) = pmf.conditional_s(a) else { continue };
        out.rows += 1;
        for &b in &b_vals {
            let err = (scale * law.get(b) - conditional_kernel(sigma2, n_x, a, b)).abs();
            out.lattice_points += 1;
            if err > out.sup_scaled_error {
                out.sup_scaled_error = err;
                out.argsup = (a, b);
            }
        }
    }
    if out.rows == 0 {
        return Err(Error::ZeroMass(0.0));
    }
    Ok(out)
}
