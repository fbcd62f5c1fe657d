//! Scaling bookkeeping around `P(X(n^2) = x)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.75;

/// Triangular profile `theta_u(v) = (u / 2) (1 - |v| / u)`.
pub fn theta(u: f64, v: f64) -> f64 {
    debug_assert!(u > 0.0, "theta needs u > 0");
    0.5 * u * (1.0 - v.abs() / u)
}

/// `beta_n = 2 sigma^2 ((1 + |x|/n)^3 + (1 - |x|/n)^3) / 3`.
pub fn beta_n(n: f64, x: f64, sigma2: f64) -> f64 {
    let q = x.abs() / n;
    2.0 * sigma2 * ((1.0 + q).powi(3) + (1.0 - q).powi(3)) / 3.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub n: f64,
    pub x: i64,
    pub c: f64,
    pub alpha: f64,
    pub sigma2: f64,
    pub theta_n_x: f64,
    pub beta_n: f64,
    /// `(1 + |x|/n) n`
    pub n_x: f64,
    /// `n - sqrt(n) log n - x`
    pub big_n_x: f64,
    /// `c n^{3/2} - |x|/2`
    pub h_n_x: f64,
}

impl ScalingParams {
    /// `theta_n(x) + c sqrt(n)`, the inverse-local-time level.
    pub fn level(&self) -> f64 {
        self.theta_n_x + self.c * self.n.sqrt()
    }
}

pub fn scaling_params(n: f64, x: i64, c: f64, alpha: f64, sigma2: f64) -> Result<ScalingParams> {
    if !(n > 0.0) || !(sigma2 > 0.0) {
        return Err(Error::Precondition(format!("need n > 0 and sigma2 > 0, got n = {n}, sigma2 = {sigma2}")));
    }
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::Precondition(format!("alpha = {alpha} must lie in (1/2, 1)")));
    }
    let reach = n - n.powf(alpha);
    if x.unsigned_abs() as f64 > reach {
        return Err(Error::OutOfRange(format!("|x| = {} exceeds n - n^alpha = {reach:.3}", x.abs())));
    }
    let xf = x as f64;
    Ok(ScalingParams {
        n,
        x,
        c,
        alpha,
        sigma2,
        theta_n_x: theta(n, xf),
        beta_n: beta_n(n, xf, sigma2),
        n_x: (1.0 + xf.abs() / n) * n,
        big_n_x: n - n.sqrt() * n.ln() - xf,
        h_n_x: c * n.powf(1.5) - xf.abs() / 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn theta_examples() {
        assert_eq!(theta(10.0, 0.0), 5.0);
        assert_eq!(theta(4.0, 2.0), 1.0);
        assert_eq!(theta(4.0, -2.0), 1.0);
    }

    #[test]
    fn beta_endpoints() {
        let s2 = 0.7;
        assert_relative_eq!(beta_n(100.0, 0.0, s2), 4.0 * s2 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(beta_n(100.0, 100.0, s2), 16.0 * s2 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(beta_n(100.0, -100.0, s2), 16.0 * s2 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn params_are_consistent() {
        let p = scaling_params(400.0, -100, 0.5, DEFAULT_ALPHA, 0.5).unwrap();
        assert_eq!(p.theta_n_x, 150.0);
        assert_eq!(p.n_x, 500.0);
        assert!(p.n_x >= p.n && p.n_x <= 2.0 * p.n);
        assert!(p.beta_n >= 4.0 * 0.5 / 3.0 && p.beta_n <= 16.0 * 0.5 / 3.0);
        assert_relative_eq!(p.big_n_x, 400.0 - 20.0 * 400f64.ln() + 100.0);
        assert_relative_eq!(p.h_n_x, 0.5 * 8000.0 - 50.0);
        assert_relative_eq!(p.level(), 160.0);
    }

    #[test]
    fn rejects_sites_beyond_reach() {
        // n - n^{3/4} = 16 - 8 = 8
        assert!(scaling_params(16.0, 8, 0.0, DEFAULT_ALPHA, 1.0).is_ok());
        assert!(matches!(scaling_params(16.0, 9, 0.0, DEFAULT_ALPHA, 1.0), Err(Error::OutOfRange(_))));
        assert!(scaling_params(16.0, 0, 0.0, 1.2, 1.0).is_err());
    }
}
