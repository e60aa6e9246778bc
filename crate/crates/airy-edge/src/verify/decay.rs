use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{below, decreasing, BoundReport, Ceilings, ReportBuilder};
use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

const ORDER: usize = 16;
const OUTER_PANEL: f64 = 0.5;
const INNER_PANEL: f64 = 0.25;
/// Inner log-range below w = u (the capped integrand is bounded there).
const INNER_BELOW: f64 = 40.0;
const MAX_LOG_RANGE: f64 = 400.0;
const TAIL_TOLERANCE: f64 = 1e-13;

/// Exponents (a, b, c) of Ĝ with the cap exponent ν and the window
/// parameters γ, κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentSet {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub nu: f64,
    pub gamma: f64,
    pub kappa: f64,
}

impl ExponentSet {
    pub fn new(a: f64, b: f64, c: f64, nu: f64, gamma: f64, kappa: f64) -> Self {
        Self { a, b, c, nu, gamma, kappa }
    }

    /// a + b + c > 0, ν ≥ 0, γ > max(0, ν − 1), κ + c > 1 and
    /// 1 + a + b − κ + (κ + c − 1)γ > 0.
    pub fn validate(&self) -> Result<()> {
        let Self { a, b, c, nu, gamma, kappa } = *self;
        let fail = |what: &str| Err(Error::Precondition(format!("exponent set {self:?}: {what}")));
        if ![a, b, c, nu, gamma, kappa].iter().all(|v| v.is_finite()) {
            return fail("non-finite entry");
        }
        if !(a + b + c > 0.0) {
            return fail("a + b + c must be positive");
        }
        if !(nu >= 0.0) {
            return fail("ν must be non-negative");
        }
        if !(gamma > (nu - 1.0).max(0.0)) {
            return fail("γ must exceed max(0, ν − 1)");
        }
        if !(kappa + c > 1.0) {
            return fail("κ + c must exceed 1");
        }
        if !(1.0 + a + b - kappa + (kappa + c - 1.0) * gamma > 0.0) {
            return fail("1 + a + b − κ + (κ + c − 1)γ must be positive");
        }
        Ok(())
    }

    fn parts(&self, u: f64, v: f64) -> (f64, f64) {
        let w = (u - v).abs();
        let g = (u.powf(-self.a) * v.powf(-self.b) + v.powf(-self.a) * u.powf(-self.b)) * w.powf(-self.c);
        let cap = 1.0 + u.max(v).powf(self.nu);
        (if g.is_nan() { f64::INFINITY } else { g }, cap)
    }

    /// min(Ĝ(u, v), 1 + max(u, v)^ν) for u, v > 0.
    pub fn capped(&self, u: f64, v: f64) -> f64 {
        let (g, cap) = self.parts(u, v);
        g.min(cap)
    }

    /// Positive where the cap is active; changes sign on the kink of `capped`.
    fn cap_margin(&self, u: f64, v: f64) -> f64 {
        let (g, cap) = self.parts(u, v);
        g - cap
    }
}

/// ∫_a^b f, split at a sign change of `kink` between the ends.
fn integrate_split<F: Fn(f64) -> f64, K: Fn(f64) -> f64>(a: f64, b: f64, f: &F, kink: &K) -> f64 {
    let rule = gauss_legendre(ORDER);
    let (ka, kb) = (kink(a), kink(b));
    if (ka > 0.0) == (kb > 0.0) {
        return rule.integrate(a, b, f);
    }
    let (mut lo, mut hi) = (a, b);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if (kink(mid) > 0.0) == (ka > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    rule.integrate(a, c, f) + rule.integrate(c, b, f)
}

/// ∫ over t ≥ t0 of f by panels of width `h`, stopping once a panel past
/// `t_min` adds less than the tail tolerance. Panels are split where `kink`
/// changes sign.
fn log_range<F: Fn(f64) -> f64, K: Fn(f64) -> f64>(t0: f64, h: f64, t_min: f64, f: F, kink: K) -> f64 {
    let mut acc = 0.0;
    let mut t = t0;
    while t < t0 + MAX_LOG_RANGE {
        let part = integrate_split(t, t + h, &f, &kink);
        acc += part;
        t += h;
        if t > t_min && part.abs() <= TAIL_TOLERANCE * acc.abs() {
            break;
        }
    }
    acc
}

/// ∫∫_{|u|,|v| ≥ s} g(|u|, |v|)/|uv| du dv for the capped integrand g.
///
/// By symmetry this is 8∫_s^∞ du/u ∫_0^∞ dw g(u, u + w)/(u + w); both
/// integrals run in log variables, u = s eᵗ and w = u eᶻ.
pub fn g_decay_integral(set: &ExponentSet, s: f64) -> Result<f64> {
    set.validate()?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("s must be positive, got {s}")));
    }
    let inner = |u: f64| {
        log_range(
            -INNER_BELOW,
            INNER_PANEL,
            2.0,
            |z| {
                let w = u * z.exp();
                set.capped(u, u + w) * w / (u + w)
            },
            |z| set.cap_margin(u, u + u * z.exp()),
        )
    };
    let rule = gauss_legendre(ORDER);
    let mut acc = 0.0;
    let mut t = 0.0;
    while t < MAX_LOG_RANGE {
        let (ts, ws) = rule.mapped(t, t + OUTER_PANEL);
        let part: f64 = ts.par_iter().zip(&ws).map(|(&t, &w)| w * inner(s * t.exp())).sum();
        acc += part;
        t += OUTER_PANEL;
        if t > 2.0 && part.abs() <= TAIL_TOLERANCE * acc.abs() {
            break;
        }
    }
    Ok(8.0 * acc)
}

/// The capped G integral along `s_list` for each exponent set. Passes when
/// each series is strictly decreasing and its value at the largest s is
/// below the ceiling. The log-log slope between the two largest s is reported.
pub fn check_g_decay(sets: &[ExponentSet], s_list: &[f64], ceilings: &Ceilings) -> Result<BoundReport> {
    if sets.is_empty() || s_list.is_empty() {
        return Err(Error::Input("G decay suite needs exponent sets and s values".into()));
    }
    for set in sets {
        set.validate()?;
    }
    let mut s_sorted = s_list.to_vec();
    s_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut report = ReportBuilder::new(
        "G-decay",
        json!({ "sets": sets, "s": s_sorted }),
        json!({ "order": ORDER, "outer_panel": OUTER_PANEL, "inner_panel": INNER_PANEL }),
    );
    for (i, set) in sets.iter().enumerate() {
        let values = s_sorted.iter().map(|&s| g_decay_integral(set, s)).collect::<Result<Vec<f64>>>()?;
        let name = format!("set{i}");
        for (s, v) in s_sorted.iter().zip(&values) {
            report.value(&name, *s, *v);
        }
        if values.len() > 1 {
            let k = values.len();
            let slope = (values[k - 1] / values[k - 2]).ln() / (s_sorted[k - 1] / s_sorted[k - 2]).ln();
            report.value(&format!("{name}_slope"), s_sorted[k - 1], slope);
        }
        let strict = values.windows(2).all(|w| w[1] < w[0]) && decreasing(&values);
        report.check(&format!("{name} decreasing"), strict, format!("{values:?}"));
        let (ok, detail) = below(ceilings.g_decay, *values.last().unwrap());
        report.check(&format!("{name} below ceiling"), ok, detail);
    }
    Ok(report.finish())
}
