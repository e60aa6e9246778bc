//! Numerical verification suites. Each suite evaluates a quantity on an
//! explicit grid and reports the observed values with a verdict against
//! ceilings calibrated from a reference run (see `golden/ceilings.json`).
//! Verdicts only speak about the computed grid.

mod decay;
mod density;
mod integrals;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub use decay::{check_g_decay, g_decay_integral, ExponentSet};
pub use density::{check_density_bound, check_palm_difference, Grid};
pub use integrals::{evaluate_i_integrals, i_integral, variance_check, w_moments, WMoments, MIN_MC_COUNT};

/// Pass/fail status of a suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

/// One named condition of a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub checks: Vec<Check>,
}

/// One reported number: `series` names what is measured, `at` the
/// parameter (n, s, ...) it was measured at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportValue {
    pub series: String,
    pub at: f64,
    pub value: f64,
}

/// Machine-readable outcome of a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub suite: String,
    pub params: Value,
    pub grid: Value,
    pub values: Vec<ReportValue>,
    pub verdict: Verdict,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.verdict.status == Status::Pass
    }

    /// Values of one series in insertion order.
    pub fn series(&self, name: &str) -> Vec<(f64, f64)> {
        self.values.iter().filter(|v| v.series == name).map(|v| (v.at, v.value)).collect()
    }

    /// One report from keyed parts, in the given order. Series and checks
    /// are prefixed with `key/`; grids are kept per key. Any inconclusive
    /// part makes the whole inconclusive, otherwise any failure fails it.
    pub fn merge(suite: &str, params: Value, parts: Vec<(String, BoundReport)>) -> BoundReport {
        let mut grid = serde_json::Map::new();
        let mut values = Vec::new();
        let mut checks = Vec::new();
        let mut status = Status::Pass;
        for (key, part) in parts {
            grid.insert(key.clone(), part.grid);
            values.extend(part.values.into_iter().map(|v| ReportValue { series: format!("{key}/{}", v.series), ..v }));
            checks.extend(part.verdict.checks.into_iter().map(|c| Check { name: format!("{key}/{}", c.name), ..c }));
            status = match (status, part.verdict.status) {
                (Status::Inconclusive, _) | (_, Status::Inconclusive) => Status::Inconclusive,
                (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
                _ => Status::Pass,
            };
        }
        BoundReport { suite: suite.into(), params, grid: Value::Object(grid), values, verdict: Verdict { status, checks } }
    }
}

pub(crate) struct ReportBuilder {
    suite: String,
    params: Value,
    grid: Value,
    values: Vec<ReportValue>,
    checks: Vec<Check>,
    inconclusive: bool,
}

impl ReportBuilder {
    pub(crate) fn new(suite: &str, params: Value, grid: Value) -> Self {
        Self { suite: suite.into(), params, grid, values: Vec::new(), checks: Vec::new(), inconclusive: false }
    }

    pub(crate) fn value(&mut self, series: &str, at: f64, value: f64) {
        self.values.push(ReportValue { series: series.into(), at, value });
    }

    pub(crate) fn check(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push(Check { name: name.into(), pass, detail });
    }

    pub(crate) fn inconclusive(&mut self, detail: String) {
        self.inconclusive = true;
        self.check("sample size", false, detail);
    }

    pub(crate) fn finish(self) -> BoundReport {
        let status = if self.inconclusive {
            Status::Inconclusive
        } else if self.checks.iter().all(|c| c.pass) {
            Status::Pass
        } else {
            Status::Fail
        };
        BoundReport {
            suite: self.suite,
            params: self.params,
            grid: self.grid,
            values: self.values,
            verdict: Verdict { status, checks: self.checks },
        }
    }
}

/// Suite ceilings. `None` disables the ceiling check (calibration runs).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ceilings {
    /// sup |ρⁿ − ρ̂ⁿ| / (1/|x| + 1(β≠2)|x|^{−1/4}).
    pub density_bound: Option<f64>,
    /// Largest ratio of suprema across n.
    pub density_spread: Option<f64>,
    /// sup |ρⁿ − ρₓⁿ| / (|y|^{−3/2} + 1(β≠2)|y|^{−1/4}).
    pub palm_difference: Option<f64>,
    /// Iⁿ_{β,k}(x, s) at the largest s, indexed by k − 1.
    pub i_integral: Option<[f64; 6]>,
    /// Capped G integral at the largest s.
    pub g_decay: Option<f64>,
}

const GOLDEN: &str = include_str!("../../golden/ceilings.json");

impl Default for Ceilings {
    fn default() -> Self {
        serde_json::from_str(GOLDEN).expect("golden ceilings parse")
    }
}

impl Ceilings {
    /// All checks against ceilings disabled.
    pub fn none() -> Self {
        Self { density_bound: None, density_spread: None, palm_difference: None, i_integral: None, g_decay: None }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("ceilings: {e}")))
    }
}

pub(crate) fn below(ceiling: Option<f64>, value: f64) -> (bool, String) {
    match ceiling {
        Some(c) => (value.is_finite() && value <= c, format!("{value:e} against ceiling {c:e}")),
        None => (value.is_finite(), format!("{value:e} (no ceiling)")),
    }
}

/// Non-increasing, and strictly decreasing while positive.
pub(crate) fn decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] && (w[1] < w[0] || w[0] == 0.0))
}
