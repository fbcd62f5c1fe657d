use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::ray_knight::DEFAULT_ALPHA;
use crate::weight::WeightFunction;

/// Growth function `g` in the tail events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Growth {
    /// `ln(m)^2`.
    #[default]
    LogSquared,
    /// `ln(m)`.
    Log,
}

impl Growth {
    pub fn eval(self, m: f64) -> f64 {
        match self {
            Self::LogSquared => m.ln().powi(2),
            Self::Log => m.ln(),
        }
    }
}

/// Which campaign to run, with its ladder and replica budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Suite {
    /// Law of `X(n^2)/n` along an `n` ladder.
    EndpointLaw { ladder: Vec<u64>, replicas: u64 },
    /// `n P(X(n^2) = x)` on the parity grid `|x| <= n - n^alpha`.
    LocalClt {
        n: u64,
        replicas: u64,
        #[serde(default = "default_eps")]
        eps: f64,
    },
    /// `sup_x |l+(k, x)/sqrt(k) - theta_1(x/sqrt(k))|` along a `k` ladder.
    ProfileShape { ladder: Vec<u64>, replicas: u64 },
    /// Range and local-time tail events at `T+_{0,m}` along an `m` ladder.
    TailBounds {
        ladder: Vec<u64>,
        replicas: u64,
        #[serde(default)]
        growth: Growth,
    },
    /// Scaled `P(T+ = n^2)` across a `c` ladder.
    InverseTime {
        n: u64,
        replicas: u64,
        c_ladder: Vec<f64>,
        #[serde(default = "default_riemann_n")]
        riemann_n: u64,
        #[serde(default = "default_riemann_k")]
        riemann_k: f64,
    },
    /// Boundary sums `W1`, `W2` beyond the bulk along an `n` ladder.
    WBoundary {
        ladder: Vec<u64>,
        replicas: u64,
        #[serde(default)]
        c: f64,
        #[serde(default = "default_big_m")]
        big_m: f64,
    },
    /// Kernel rows against transition frequencies extracted from walks.
    KernelExtraction {
        walks: u64,
        steps: u64,
        #[serde(default = "default_max_state")]
        max_state: i64,
    },
    /// Profile laws at `T+_{0,m}`: Ray-Knight sampler against direct walks.
    RkEquivalence {
        ms: Vec<u64>,
        replicas: u64,
        #[serde(default = "default_reach")]
        reach: i64,
    },
}

fn default_eps() -> f64 {
    0.2
}
fn default_riemann_n() -> u64 {
    10_000
}
fn default_riemann_k() -> f64 {
    6.0
}
fn default_big_m() -> f64 {
    1.0
}
fn default_max_state() -> i64 {
    5
}
fn default_reach() -> i64 {
    3
}
fn default_seed() -> u64 {
    1
}
fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Self::EndpointLaw { .. } => "endpoint-law",
            Self::LocalClt { .. } => "local-clt",
            Self::ProfileShape { .. } => "profile-shape",
            Self::TailBounds { .. } => "tail-bounds",
            Self::InverseTime { .. } => "inverse-time",
            Self::WBoundary { .. } => "w-boundary",
            Self::KernelExtraction { .. } => "kernel-extraction",
            Self::RkEquivalence { .. } => "rk-equivalence",
        }
    }

    /// Replicas per ladder point (walks for the kernel suite).
    pub fn replicas(&self) -> u64 {
        match self {
            Self::EndpointLaw { replicas, .. }
            | Self::LocalClt { replicas, .. }
            | Self::ProfileShape { replicas, .. }
            | Self::TailBounds { replicas, .. }
            | Self::InverseTime { replicas, .. }
            | Self::WBoundary { replicas, .. }
            | Self::RkEquivalence { replicas, .. } => *replicas,
            Self::KernelExtraction { walks, .. } => *walks,
        }
    }
}

/// A fully specified campaign. The thread budget only affects speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub weight: WeightFunction,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// 0 means one worker per core.
    #[serde(default)]
    pub threads: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub suite: Suite,
}

impl CampaignConfig {
    pub fn new(weight: WeightFunction, seed: u64, suite: Suite) -> Self {
        Self { weight, seed, threads: 0, alpha: DEFAULT_ALPHA, suite }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn execution(&self) -> Execution {
        Execution::from_threads(self.threads)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.suite.replicas() == 0 {
            return bad("replicas must be at least 1".into());
        }
        if !(self.alpha > 0.5 && self.alpha < 1.0) {
            return bad(format!("alpha {} must lie in (1/2, 1)", self.alpha));
        }
        let increasing = |l: &[u64]| !l.is_empty() && l.windows(2).all(|p| p[0] < p[1]);
        match &self.suite {
            Suite::EndpointLaw { ladder, .. } | Suite::ProfileShape { ladder, .. } | Suite::WBoundary { ladder, .. } => {
                if !increasing(ladder) || ladder[0] == 0 {
                    return bad(format!("ladder {ladder:?} must be nonempty, positive and strictly increasing"));
                }
            }
            Suite::TailBounds { ladder, .. } => {
                if !increasing(ladder) || ladder[0] < 3 {
                    return bad(format!("m ladder {ladder:?} must be strictly increasing from m >= 3"));
                }
            }
            Suite::RkEquivalence { ms, reach, .. } => {
                if !increasing(ms) || ms[0] == 0 || *reach < 0 {
                    return bad(format!("m list {ms:?} must be positive and strictly increasing"));
                }
            }
            Suite::LocalClt { n, eps, .. } => {
                if *n == 0 || !(*eps > 0.0 && *eps < 1.0) {
                    return bad(format!("need n >= 1 and eps in (0, 1), got n = {n}, eps = {eps}"));
                }
            }
            Suite::InverseTime { n, c_ladder, riemann_n, riemann_k, .. } => {
                if *n < 2 || c_ladder.is_empty() || *riemann_n == 0 || *riemann_k <= 0.0 {
                    return bad("inverse-time needs n >= 2, a nonempty c ladder and a positive Riemann grid".into());
                }
            }
            Suite::KernelExtraction { steps, max_state, .. } => {
                if *steps == 0 || *max_state < 0 {
                    return bad("kernel extraction needs steps >= 1 and max_state >= 0".into());
                }
            }
        }
        if let Suite::WBoundary { big_m, .. } = &self.suite {
            if *big_m <= 0.0 {
                return bad(format!("M = {big_m} must be positive"));
            }
        }
        Ok(())
    }
}
