//! Exact laws by brute-force path enumeration, written from the step rule
//! alone and sharing no code with the library.

#![allow(dead_code, clippy::too_many_arguments)]

use std::collections::HashMap;

/// `w` as a plain closure.
pub type Weight = fn(f64) -> f64;

pub fn exp1(z: f64) -> f64 {
    z.exp()
}

pub fn ramp(z: f64) -> f64 {
    1.0 + z.max(0.0)
}

pub fn exp01(z: f64) -> f64 {
    (0.1 * z).exp()
}

#[derive(Clone, Default)]
struct Path {
    pos: i64,
    plus: HashMap<i64, i64>,
    minus: HashMap<i64, i64>,
}

impl Path {
    fn p_right(&self, w: Weight) -> f64 {
        let d = (self.plus.get(&self.pos).copied().unwrap_or(0) - self.minus.get(&self.pos).copied().unwrap_or(0)) as f64;
        w(-d) / (w(d) + w(-d))
    }

    fn go(&self, right: bool) -> Self {
        let mut next = self.clone();
        let map = if right { &mut next.plus } else { &mut next.minus };
        *map.entry(self.pos).or_insert(0) += 1;
        next.pos += if right { 1 } else { -1 };
        next
    }
}

/// `laws[k - 1][x]` = `P(X(k) = x)` for `k = 1..=k_max`.
pub fn endpoint_laws(w: Weight, k_max: usize) -> Vec<HashMap<i64, f64>> {
    let mut laws = vec![HashMap::new(); k_max];
    fn walk(w: Weight, path: Path, prob: f64, k: usize, k_max: usize, laws: &mut [HashMap<i64, f64>]) {
        if k == k_max {
            return;
        }
        let p = path.p_right(w);
        for (right, q) in [(true, p), (false, 1.0 - p)] {
            if q == 0.0 {
                continue;
            }
            let next = path.go(right);
            *laws[k].entry(next.pos).or_insert(0.0) += prob * q;
            walk(w, next, prob * q, k + 1, k_max, laws);
        }
    }
    walk(w, Path::default(), 1.0, 0, k_max, &mut laws);
    laws
}

/// Law of `(l+(T, y))_{|y| <= reach}` at `T = T+_{0,m}` over paths of at
/// most `depth` steps, and the mass of longer paths.
pub fn profile_law_at_inverse_time(w: Weight, m: i64, reach: i64, depth: usize) -> (HashMap<Vec<i64>, f64>, f64) {
    let mut law = HashMap::new();
    let mut unfinished = 0.0;
    fn walk(w: Weight, path: Path, prob: f64, left: usize, m: i64, reach: i64, law: &mut HashMap<Vec<i64>, f64>, unfinished: &mut f64) {
        if left == 0 {
            *unfinished += prob;
            return;
        }
        let p = path.p_right(w);
        for (right, q) in [(true, p), (false, 1.0 - p)] {
            let next = path.go(right);
            if right && path.pos == 0 && next.plus.get(&0).copied().unwrap_or(0) == m {
                let key = (-reach..=reach).map(|y| next.plus.get(&y).copied().unwrap_or(0)).collect();
                *law.entry(key).or_insert(0.0) += prob * q;
            } else {
                walk(w, next, prob * q, left - 1, m, reach, law, unfinished);
            }
        }
    }
    walk(w, Path::default(), 1.0, depth, m, reach, &mut law, &mut unfinished);
    (law, unfinished)
}

/// Kernel row `P(eta -> eta + L - 1)` for `L = 0..len`, from the step rule:
/// at a site with `d = -eta` the walk steps left `L` times, then right.
pub fn kernel_row(w: Weight, eta: i64, len: usize) -> Vec<f64> {
    let p = |d: f64| w(-d) / (w(d) + w(-d));
    let mut stay = 1.0;
    let mut row = Vec::with_capacity(len);
    for l in 0..len as i64 {
        let d = (-eta - l) as f64;
        row.push(stay * p(d));
        stay *= 1.0 - p(d);
    }
    row
}

/// Stationary law on `[lo, hi]` by power iteration on truncated rows.
pub fn stationary(w: Weight, lo: i64, hi: i64, iterations: usize) -> Vec<f64> {
    let n = (hi - lo + 1) as usize;
    let rows: Vec<Vec<f64>> = (lo..=hi).map(|s| kernel_row(w, s, (hi - s + 2) as usize)).collect();
    let mut v = vec![0.0; n];
    v[(-lo) as usize] = 1.0;
    for _ in 0..iterations {
        let mut next = vec![0.0; n];
        for (i, row) in rows.iter().enumerate() {
            let s = lo + i as i64;
            for (l, q) in row.iter().enumerate() {
                let t = s + l as i64 - 1;
                if t >= lo && t <= hi {
                    next[(t - lo) as usize] += v[i] * q;
                }
            }
        }
        let total: f64 = next.iter().sum();
        v = next.into_iter().map(|x| x / total).collect();
    }
    v
}

/// Law of `(sum r_i, sum_i (N - i + 1) r_i)` for iid `r = +-1/2`, by
/// enumerating all sign sequences; keys are doubled to stay integral.
pub fn two_point_bivariate(n: usize) -> HashMap<(i64, i64), f64> {
    let mut law = HashMap::new();
    for mask in 0u32..(1 << n) {
        let (mut a, mut b) = (0i64, 0i64);
        for i in 0..n {
            let r = if mask >> i & 1 == 1 { 1 } else { -1 };
            a += r;
            b += (n - i) as i64 * r;
        }
        *law.entry((a, b)).or_insert(0.0) += 0.5f64.powi(n as i32);
    }
    law
}
