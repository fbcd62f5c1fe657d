//! Weight functions driving the walk.
//!
//! A weight `w: Z -> (0, inf)` must be nondecreasing and satisfy
//! `w(z) - w(-z) > 0` for large `z`. Both conditions are checked on a finite
//! window at construction; anything outside the window that the walk later
//! reaches is evaluated lazily and range failures surface as
//! [`Error::EvaluationRange`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width of the window `[-Z, Z]` on which monotonicity, positivity and
/// asymmetry are validated.
pub const VALIDATION_WINDOW: i64 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum WeightFunction {
    /// `w(z) = exp(rate * z)`.
    Exponential { rate: f64 },
    /// `w(z) = floor + slope * max(z, 0)`.
    LinearRamp { slope: f64, floor: f64 },
    /// Explicit values on `[start, start + values.len())`, constant outside.
    Table { start: i64, values: Vec<f64> },
}

impl WeightFunction {
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::Exponential { rate }.validated()
    }

    pub fn linear_ramp(slope: f64, floor: f64) -> Result<Self> {
        Self::LinearRamp { slope, floor }.validated()
    }

    pub fn table(start: i64, values: Vec<f64>) -> Result<Self> {
        Self::Table { start, values }.validated()
    }

    /// Checks positivity, monotonicity and asymmetry on
    /// `[-VALIDATION_WINDOW, VALIDATION_WINDOW]`.
    pub fn validated(self) -> Result<Self> {
        match &self {
            Self::Exponential { rate } if !rate.is_finite() => {
                return Err(Error::InvalidWeight(format!("rate {rate} is not finite")))
            }
            Self::LinearRamp { slope, floor } if !(slope.is_finite() && floor.is_finite()) => {
                return Err(Error::InvalidWeight("ramp parameters must be finite".into()))
            }
            Self::LinearRamp { floor, .. } if *floor <= 0.0 => {
                return Err(Error::InvalidWeight(format!("ramp floor {floor} must be positive")))
            }
            Self::Table { values, .. } if values.is_empty() => {
                return Err(Error::InvalidWeight("table has no values".into()))
            }
            _ => {}
        }
        let z_max = VALIDATION_WINDOW;
        let mut prev = self.eval(-z_max)?;
        if prev <= 0.0 {
            return Err(Error::InvalidWeight(format!("w({}) = {prev} is not positive", -z_max)));
        }
        for z in (-z_max + 1)..=z_max {
            let cur = self.eval(z)?;
            if cur <= 0.0 {
                return Err(Error::InvalidWeight(format!("w({z}) = {cur} is not positive")));
            }
            if cur < prev {
                return Err(Error::InvalidWeight(format!("w is decreasing between {} and {z}", z - 1)));
            }
            prev = cur;
        }
        let gap = self.eval(z_max)? - self.eval(-z_max)?;
        if gap <= 0.0 {
            return Err(Error::InvalidWeight(format!(
                "asymmetry condition fails: w({z_max}) - w({}) = {gap}",
                -z_max
            )));
        }
        Ok(self)
    }

    /// Evaluates `w(z)`, failing if the value is not a finite positive number.
    pub fn eval(&self, z: i64) -> Result<f64> {
        let v = match self {
            Self::Exponential { rate } => (rate * z as f64).exp(),
            Self::LinearRamp { slope, floor } => floor + slope * z.max(0) as f64,
            Self::Table { start, values } => {
                let idx = (z - start).clamp(0, values.len() as i64 - 1);
                values[idx as usize]
            }
        };
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::EvaluationRange { z })
        }
    }
}

/// Probability of a right step from a site whose directed-edge local times
/// differ by `d = l+ - l-`: `w(-d) / (w(d) + w(-d))`.
pub fn step_probability(w: &WeightFunction, d: i64) -> Result<f64> {
    let right = w.eval(-d)?;
    let left = w.eval(d)?;
    let total = right + left;
    if !total.is_finite() {
        return Err(Error::EvaluationRange { z: d });
    }
    Ok(right / total)
}

/// Right-step probabilities as `u64` thresholds, cached on a window of `d`
/// that grows on demand. A step goes right iff a uniform `u64` is strictly
/// below the threshold.
#[derive(Debug, Clone)]
pub struct StepTable {
    weight: WeightFunction,
    half_width: i64,
    thresholds: Vec<u64>,
}

impl StepTable {
    pub fn new(weight: &WeightFunction) -> Result<Self> {
        let mut table = Self { weight: weight.clone(), half_width: -1, thresholds: Vec::new() };
        table.grow(32)?;
        Ok(table)
    }

    pub fn weight(&self) -> &WeightFunction {
        &self.weight
    }

    fn grow(&mut self, half_width: i64) -> Result<()> {
        let mut thresholds = Vec::with_capacity((2 * half_width + 1) as usize);
        for d in -half_width..=half_width {
            thresholds.push(probability_to_threshold(step_probability(&self.weight, d)?));
        }
        self.thresholds = thresholds;
        self.half_width = half_width;
        Ok(())
    }

    #[inline]
    pub fn threshold(&mut self, d: i64) -> Result<u64> {
        match self.thresholds.get((d + self.half_width) as usize) {
            Some(&t) if d.abs() <= self.half_width => Ok(t),
            _ => {
                self.grow((2 * self.half_width).max(d.abs()))?;
                Ok(self.thresholds[(d + self.half_width) as usize])
            }
        }
    }
}

pub(crate) fn probability_to_threshold(p: f64) -> u64 {
    // 2^64 * p, saturating at the top.
    let scaled = p * 18_446_744_073_709_551_616.0;
    if scaled >= 18_446_744_073_709_551_615.0 {
        u64::MAX
    } else {
        scaled as u64
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exponential { rate } => write!(f, "exp:{rate}"),
            Self::LinearRamp { slope, floor } => write!(f, "ramp:{slope},{floor}"),
            Self::Table { start, values } => {
                write!(f, "table:{start}:")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for WeightFunction {
    type Err = Error;

    /// Parses `exp:<rate>`, `ramp:<slope>,<floor>` or
    /// `table:<start>:<v0>,<v1>,...`, then validates.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidWeight(format!("{msg} in {s:?}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("malformed number"));
        let (family, rest) = s.split_once(':').ok_or_else(|| bad("missing family prefix"))?;
        match family.trim() {
            "exp" => Self::exponential(num(rest)?),
            "ramp" => {
                let (slope, floor) = rest.split_once(',').ok_or_else(|| bad("expected slope,floor"))?;
                Self::linear_ramp(num(slope)?, num(floor)?)
            }
            "table" => {
                let (start, values) = rest.split_once(':').ok_or_else(|| bad("expected start:values"))?;
                let start = start.trim().parse::<i64>().map_err(|_| bad("malformed start"))?;
                let values = values.split(',').map(num).collect::<Result<Vec<_>>>()?;
                Self::table(start, values)
            }
            _ => Err(bad("unknown family")),
        }
    }
}

impl TryFrom<String> for WeightFunction {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<WeightFunction> for String {
    fn from(w: WeightFunction) -> String {
        w.to_string()
    }
}
