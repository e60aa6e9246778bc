use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{below, BoundReport, Ceilings, ReportBuilder};
use crate::densities::{rho_hat, EdgeDensity};
use crate::error::{Error, Result};
use crate::kernels::{Beta, KernelHandle, Regime};

/// Tolerance of the identity route ρ − ρₓ = L(x, ·)/ρ(x).
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

/// Uniform grid over a union of closed intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub intervals: Vec<(f64, f64)>,
    pub step: f64,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Self {
        Self { intervals: vec![(lo, hi)], step }
    }

    pub fn union(intervals: Vec<(f64, f64)>, step: f64) -> Self {
        Self { intervals, step }
    }

    /// Grid points at or above `floor`, ascending. Each interval starts at
    /// its (clipped) lower end and advances by `step`.
    pub fn points(&self, floor: f64) -> Result<Vec<f64>> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Domain(format!("grid step must be positive, got {}", self.step)));
        }
        let mut out = Vec::new();
        for &(lo, hi) in &self.intervals {
            let lo = lo.max(floor);
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::Domain(format!("grid interval [{lo}, {hi}] must be finite")));
            }
            let count = ((hi - lo) / self.step + 1e-9).floor();
            if count < 0.0 {
                continue;
            }
            out.extend((0..=count as usize).map(|i| lo + i as f64 * self.step));
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        Ok(out)
    }
}

fn regime_label(r: Regime) -> String {
    match r {
        Regime::Finite(n) => n.to_string(),
        Regime::Limit => "limit".into(),
    }
}

fn regime_at(r: Regime) -> f64 {
    match r {
        Regime::Finite(n) => n as f64,
        Regime::Limit => f64::INFINITY,
    }
}

/// Reciprocal of 1/|x| + 1(β≠2)|x|^{−1/4} (zero at x = 0).
fn density_weight(beta: Beta, x: f64) -> f64 {
    let a = x.abs();
    let extra = if beta == Beta::Two { 0.0 } else { a.powf(-0.25) };
    1.0 / (1.0 / a + extra)
}

/// Reciprocal of |y|^{−3/2} + 1(β≠2)|y|^{−1/4}.
fn palm_weight(beta: Beta, y: f64) -> f64 {
    let a = y.abs();
    let extra = if beta == Beta::Two { 0.0 } else { a.powf(-0.25) };
    1.0 / (a.powf(-1.5) + extra)
}

/// sup over the grid of |ρ¹ − ρ̂|·(1/|x| + 1(β≠2)|x|^{−1/4})^{−1} for each
/// regime, with the grid clipped to [−2n^{2/3}, ∞). Also reports
/// C = sup ρ¹/√(|x| + 1). Passes when every supremum is below the ceiling
/// and the largest and smallest finite-n suprema are within the spread ceiling.
pub fn check_density_bound(beta: Beta, regimes: &[Regime], grid: &Grid, ceilings: &Ceilings) -> Result<BoundReport> {
    if regimes.is_empty() {
        return Err(Error::Input("density bound suite needs at least one regime".into()));
    }
    let labels: Vec<String> = regimes.iter().map(|r| regime_label(*r)).collect();
    let mut report = ReportBuilder::new(
        "density-bound",
        json!({ "beta": beta.as_u8(), "n": labels }),
        serde_json::to_value(grid).expect("grid serialises"),
    );
    let rows: Vec<Result<(f64, f64, usize)>> = regimes
        .par_iter()
        .map(|&regime| {
            let kernel = KernelHandle::new(beta, regime).resolve()?;
            let density = EdgeDensity { regime };
            let floor = match regime {
                Regime::Finite(_) => -0.5 * density.width(),
                Regime::Limit => f64::NEG_INFINITY,
            };
            let xs = grid.points(floor)?;
            let mut sup: f64 = 0.0;
            let mut growth: f64 = 0.0;
            for &x in &xs {
                let rho = kernel.density(x);
                sup = sup.max((rho - rho_hat(&density, x)).abs() * density_weight(beta, x));
                growth = growth.max(rho / (x.abs() + 1.0).sqrt());
            }
            Ok((sup, growth, xs.len()))
        })
        .collect();
    let mut sups = Vec::new();
    for (regime, row) in regimes.iter().zip(rows) {
        let (sup, growth, count) = row?;
        let at = regime_at(*regime);
        report.value("weighted_sup", at, sup);
        report.value("growth_constant", at, growth);
        report.value("grid_points", at, count as f64);
        let (ok, detail) = below(ceilings.density_bound, sup);
        report.check(&format!("sup at n = {}", regime_label(*regime)), ok, detail);
        if matches!(regime, Regime::Finite(_)) {
            sups.push(sup);
        }
    }
    if sups.len() > 1 {
        let hi = sups.iter().copied().fold(f64::MIN, f64::max);
        let lo = sups.iter().copied().fold(f64::MAX, f64::min);
        let spread = hi / lo;
        report.value("spread", sups.len() as f64, spread);
        let (ok, detail) = below(ceilings.density_spread, spread);
        report.check("uniform over n", ok, detail);
    }
    Ok(report.finish())
}

/// sup over the grid of |ρ¹ − ρ¹ₓ|·(|y|^{−3/2} + 1(β≠2)|y|^{−1/4})^{−1}.
///
/// The difference is taken between the diagonals of the plain and the
/// Palm-reduced kernels and checked against L(x, y)/ρ¹(x) computed through
/// the other route (the J-form for β = 1, 4). For β ≠ 2 the supremum under
/// the |y|^{−3/2} weight alone is reported as `strict_weight_sup`.
pub fn check_palm_difference(beta: Beta, regime: Regime, x: f64, grid: &Grid, ceilings: &Ceilings) -> Result<BoundReport> {
    let plain = KernelHandle::new(beta, regime).resolve()?;
    let palm = KernelHandle::new(beta, regime).with_anchor(x).resolve()?;
    let (_, rho_x) = palm.anchor().expect("anchored");
    let floor = match regime {
        Regime::Finite(n) => -2.0 * (n as f64).powf(2.0 / 3.0),
        Regime::Limit => f64::NEG_INFINITY,
    };
    let ys = grid.points(floor)?;
    if let Some(y) = ys.iter().find(|y| y.abs() <= x.abs() + 1.0) {
        return Err(Error::Precondition(format!("grid point {y} violates |y| > |x| + 1 = {}", x.abs() + 1.0)));
    }
    let mut report = ReportBuilder::new(
        "palm-difference",
        json!({ "beta": beta.as_u8(), "n": regime_label(regime), "x": x }),
        serde_json::to_value(grid).expect("grid serialises"),
    );
    let rows: Vec<(f64, f64, f64)> = ys
        .par_iter()
        .map(|&y| {
            let diff = plain.value(y, y).scalar_part() - palm.value(y, y).scalar_part();
            let identity = plain.l_product(x, y) / rho_x;
            (y, diff, identity)
        })
        .collect();
    let mut sup: f64 = 0.0;
    let mut strict: f64 = 0.0;
    let mut identity_gap: f64 = 0.0;
    for &(y, diff, identity) in &rows {
        let weighted = diff.abs() * palm_weight(beta, y);
        report.value("weighted_difference", y, weighted);
        sup = sup.max(weighted);
        strict = strict.max(diff.abs() * y.abs().powf(1.5));
        identity_gap = identity_gap.max((diff - identity).abs());
    }
    report.value("weighted_sup", regime_at(regime), sup);
    if beta != Beta::Two {
        report.value("strict_weight_sup", regime_at(regime), strict);
    }
    report.value("identity_gap", regime_at(regime), identity_gap);
    report.check(
        "identity route",
        identity_gap <= IDENTITY_TOLERANCE,
        format!("max |difference − L/ρ(x)| = {identity_gap:e}"),
    );
    let (ok, detail) = below(ceilings.palm_difference, sup);
    report.check("bounded", ok, detail);
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points_respect_floor_and_union() {
        let g = Grid::union(vec![(-4.0, -2.0), (2.0, 3.0)], 1.0);
        assert_eq!(g.points(-3.0).unwrap(), vec![-3.0, -2.0, 2.0, 3.0]);
        assert!(Grid::new(0.0, 1.0, 0.0).points(f64::NEG_INFINITY).is_err());
        assert!(Grid::new(f64::NEG_INFINITY, 1.0, 1.0).points(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn weights_vanish_at_the_origin() {
        assert_eq!(density_weight(Beta::Two, 0.0), 0.0);
        assert_eq!(density_weight(Beta::Two, -4.0), 4.0);
        assert!((palm_weight(Beta::Two, 4.0) - 8.0).abs() < 1e-12);
    }
}
