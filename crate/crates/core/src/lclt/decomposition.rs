//! Bookkeeping for `sum_y l+(T+_{x,m}, y)` split into a bulk part and two
//! boundary parts, with the bulk compared against its iid-`r` replacement.
//!
//! With `L = floor(n - sqrt(n) ln n)` and `m = theta_n(x) + c sqrt(n)`:
//!
//! ```text
//! Z  = sum_{|y| <= L} l+(y),   W1 = sum_{y > L} l+(y),   W2 = sum_{y < -L} l+(y)
//! l~(y) = theta_n(y) + c sqrt(n) - 1 + sum_{z = x+1}^{y} r_z     (y > x)
//! l~(y) = theta_n(y) + c sqrt(n)     + sum_{z = y+1}^{x} r_z     (y <= x)
//! ```
//!
//! The `-1` on `y > x` is the walk standing at `x + 1` at `T+_{x,m}`.
//! `V1`/`V2` sum `l~` over `x < y <= L` and `-L <= y <= x`; `S1`/`S2` are
//! their random parts and `Y1`/`Y2` the plain sums of the `r_z` involved.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ray_knight::{theta, ScalingParams};
use crate::walk::LocalTimeTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTerms {
    pub bulk: i64,
    pub z: u64,
    pub w1: u64,
    pub w2: u64,
    pub v1: f64,
    pub v2: f64,
    pub s1: f64,
    pub s2: f64,
    pub y1: f64,
    pub y2: f64,
    /// `l~(L)` and `l~(-L)`.
    pub l_tilde_1: f64,
    pub l_tilde_2: f64,
    /// `l+(y) = l~(y)` for every `|y| <= L`.
    pub coupled: bool,
}

/// `floor(n - sqrt(n) ln n)`.
pub fn bulk_edge(n: f64) -> i64 {
    (n - n.sqrt() * n.ln()).floor() as i64
}

impl DecompositionTerms {
    /// `r(z)` must be defined on `-L < z <= L`; sites that never read their
    /// chain may return anything.
    pub fn new(params: &ScalingParams, profile: &LocalTimeTable, r: impl Fn(i64) -> f64) -> Result<Self> {
        let (n, x) = (params.n, params.x);
        let big_l = bulk_edge(n);
        if x > 0 || x < -big_l {
            return Err(Error::Precondition(format!("need -{big_l} <= x <= 0, got {x}")));
        }
        let level = params.level();
        let (mut z, mut w1, mut w2) = (0u64, 0u64, 0u64);
        for (y, plus, _) in profile.iter() {
            if y > big_l {
                w1 += plus;
            } else if y < -big_l {
                w2 += plus;
            } else {
                z += plus;
            }
        }
        let mut coupled = true;
        let mut check = |y: i64, tilde: f64| {
            if (profile.plus(y) as f64 - tilde).abs() > 1e-9 {
                coupled = false;
            }
        };

        let (mut v1, mut s1, mut y1) = (0.0, 0.0, 0.0);
        let mut tilde = level;
        for y in (x + 1)..=big_l {
            let ry = r(y);
            y1 += ry;
            s1 += (big_l - y + 1) as f64 * ry;
            tilde = theta(n, y as f64) + params.c * n.sqrt() - 1.0 + y1;
            v1 += tilde;
            check(y, tilde);
        }
        let l_tilde_1 = if big_l > x { tilde } else { level };

        let (mut v2, mut s2, mut y2) = (level, 0.0, 0.0);
        check(x, level);
        let mut tilde = level;
        for y in (-big_l..x).rev() {
            let rz = r(y + 1);
            y2 += rz;
            s2 += (y + 1 + big_l) as f64 * rz;
            tilde = theta(n, y as f64) + params.c * n.sqrt() + y2;
            v2 += tilde;
            check(y, tilde);
        }
        let l_tilde_2 = tilde;
        Ok(Self { bulk: big_l, z, w1, w2, v1, v2, s1, s2, y1, y2, l_tilde_1, l_tilde_2, coupled })
    }

    /// `V1 + V2 - S1 - S2`, the non-random part of the bulk sum.
    pub fn deterministic_part(&self) -> f64 {
        self.v1 + self.v2 - self.s1 - self.s2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ray_knight::{scaling_params, DEFAULT_ALPHA};

    /// Profile generated by the tilde formulas themselves with given `r`.
    fn tilde_profile(p: &ScalingParams, r: &dyn Fn(i64) -> f64) -> LocalTimeTable {
        let big_l = bulk_edge(p.n);
        let mut plus = Vec::new();
        for y in -big_l..=big_l {
            let v = if y > p.x {
                theta(p.n, y as f64) + p.c * p.n.sqrt() - 1.0 + ((p.x + 1)..=y).map(r).sum::<f64>()
            } else {
                theta(p.n, y as f64) + p.c * p.n.sqrt() + ((y + 1)..=p.x).map(r).sum::<f64>()
            };
            plus.push(v.round() as u64);
        }
        LocalTimeTable::from_dense(-big_l, plus.clone(), vec![0; plus.len()])
    }

    #[test]
    fn bulk_identity_on_the_coupling_event() {
        let p = scaling_params(400.0, -20, 0.5, DEFAULT_ALPHA, 0.5).unwrap();
        let r = |z: i64| if z.rem_euclid(3) == 0 { 0.5 } else { -0.5 };
        let profile = tilde_profile(&p, &r);
        let t = DecompositionTerms::new(&p, &profile, r).unwrap();
        assert!(t.coupled);
        assert_eq!(t.z as f64, t.v1 + t.v2);
        assert_eq!((t.w1, t.w2), (0, 0));
        // V1 + V2 = n^2/2 + 2c n^{3/2} + O(n log^2 n) + S1 + S2
        let lead = p.n * p.n / 2.0 + 2.0 * p.c * p.n.powf(1.5);
        assert!((t.deterministic_part() - lead).abs() <= p.n * p.n.ln().powi(2));
        let expect1 = theta(p.n, t.bulk as f64) + p.c * p.n.sqrt() - 1.0 + t.y1;
        assert_eq!(t.l_tilde_1, expect1);
        let expect2 = theta(p.n, -t.bulk as f64) + p.c * p.n.sqrt() + t.y2;
        assert_eq!(t.l_tilde_2, expect2);
    }

    #[test]
    fn perturbed_profile_breaks_the_coupling() {
        let p = scaling_params(100.0, 0, 0.0, DEFAULT_ALPHA, 0.5).unwrap();
        let r = |_: i64| 0.5;
        let profile = tilde_profile(&p, &r);
        let (lo, _) = profile.site_range().unwrap();
        let mut plus: Vec<u64> = profile.iter().map(|(_, p, _)| p).collect();
        plus[3] += 1;
        let bumped = LocalTimeTable::from_dense(lo, plus.clone(), vec![0; plus.len()]);
        assert!(!DecompositionTerms::new(&p, &bumped, r).unwrap().coupled);
    }
}
