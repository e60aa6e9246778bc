//! Regularised drifts of the soft-edge dynamics.
//!
//! Finite n: d(x, y) = β{Σⱼ 1/(x − yⱼ) − n^{1/3} − n^{−1/3}x/2}. The limit
//! drift compensates the conditionally convergent sum by ∫ρ̂(y)/(−y) over a
//! growing shell, or splits it as β{u_β(x) + g_{β,s}(x, y)} with u_β built
//! from the Palm density ρₓ.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::densities::{compensator, rho_hat, EdgeDensity};
use crate::error::{Error, Result};
use crate::kernels::{Beta, KernelHandle, PalmProfile, Regime};
use crate::quad::gauss_legendre;
use crate::sampler::{PointConfiguration, COINCIDENCE};

/// Default shell radius for u_β.
pub const DEFAULT_SHELL: f64 = 200.0;
/// Beyond this distance from the anchor the limit Palm density is replaced
/// by ρ̂ in shell integrals.
pub const PALM_PROFILE_RADIUS: f64 = 200.0;
/// Largest accepted change of the shell value between s/4 and s.
const SHELL_TOLERANCE: f64 = 0.05;

/// How the interaction sum is compensated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CompensatorMode {
    /// Σ_{|y|<r} 1/(x − y) − ∫_{|y|<r} ρ̂(y)/(−y) dy.
    Semicircle,
    /// Σ_j 1/(x − yⱼ) − n^{1/3} − n^{−1/3}x/2.
    FiniteN { n: usize },
    /// u_β(x) + Σ_{|x−y|<s} 1/(x − y) − ∫_{|x−y|<s} ρₓ(y)/(x − y) dy.
    Palm,
}

/// β, truncation radius (or shell parameter) and compensator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftSpec {
    pub beta: Beta,
    pub radius: f64,
    pub mode: CompensatorMode,
}

impl DriftSpec {
    pub fn new(beta: Beta, radius: f64, mode: CompensatorMode) -> Result<Self> {
        let spec = Self { beta, radius, mode };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) {
            return Err(Error::Domain(format!("truncation radius must be positive, got {}", self.radius)));
        }
        if let CompensatorMode::FiniteN { n: 0 } = self.mode {
            return Err(Error::Domain("finite-n compensator needs n ≥ 1".into()));
        }
        Ok(())
    }
}

/// Frozen outer configuration of a head/tail split.
#[derive(Debug, Clone, PartialEq)]
pub struct TailView {
    config: PointConfiguration,
}

impl TailView {
    pub fn new(config: PointConfiguration) -> Self {
        Self { config }
    }

    pub fn configuration(&self) -> &PointConfiguration {
        &self.config
    }

    pub fn points(&self) -> &[f64] {
        self.config.points()
    }

    pub fn max(&self) -> Option<f64> {
        self.config.top()
    }
}

/// Σ 1/(x − y) over the points accepted by `keep`, added in increasing |x − y|.
/// `points` must be sorted decreasingly.
pub fn ordered_sum<F: Fn(f64) -> bool>(x: f64, points: &[f64], keep: F) -> Result<f64> {
    outward_sum(x, points, None, keep)
}

/// [`ordered_sum`] skipping index `skip`; the two sides of x are merged by
/// distance, so no sort is needed.
pub(crate) fn outward_sum<F: Fn(f64) -> bool>(x: f64, points: &[f64], skip: Option<usize>, keep: F) -> Result<f64> {
    let split = points.partition_point(|y| *y > x);
    let (mut up, mut down) = (split, split);
    let mut acc = 0.0;
    loop {
        let mut above = up.checked_sub(1);
        if above.is_some() && above == skip {
            above = above.and_then(|i| i.checked_sub(1));
        }
        let below = if Some(down) == skip { down + 1 } else { down };
        let below = (below < points.len()).then_some(below);
        let pick = match (above, below) {
            (None, None) => break,
            (Some(i), None) => i,
            (None, Some(j)) => j,
            (Some(i), Some(j)) => {
                if points[i] - x <= x - points[j] {
                    i
                } else {
                    j
                }
            }
        };
        let y = points[pick];
        if (x - y).abs() <= COINCIDENCE {
            return Err(Error::Singularity(format!("evaluation point {x} coincides with a particle")));
        }
        if keep(y) {
            acc += 1.0 / (x - y);
        }
        if pick < split {
            up = pick;
        } else {
            down = pick + 1;
        }
    }
    Ok(acc)
}

/// β{Σⱼ 1/(x − yⱼ) − n^{1/3} − n^{−1/3}x/2} with `others` the other n − 1 points.
pub fn finite_log_derivative(beta: Beta, n: usize, x: f64, others: &PointConfiguration) -> Result<f64> {
    if n == 0 || others.len() + 1 != n {
        return Err(Error::Precondition(format!(
            "finite log-derivative for n = {n} needs n − 1 other points, got {}",
            others.len()
        )));
    }
    Ok(beta.value() * (ordered_sum(x, others.points(), |_| true)? - finite_compensator(n, x)))
}

/// n^{1/3} + n^{−1/3}x/2.
pub fn finite_compensator(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    nf.cbrt() + 0.5 * x / nf.cbrt()
}

/// (β/2){Σ_{|yⱼ|<r} 1/(x − yⱼ) − 2√r/π}.
pub fn truncated_isde_drift(spec: &DriftSpec, x: f64, config: &PointConfiguration) -> Result<f64> {
    spec.validate()?;
    if spec.mode != CompensatorMode::Semicircle {
        return Err(Error::Precondition("truncated ISDE drift uses the semicircle compensator".into()));
    }
    let r = spec.radius;
    let sum = ordered_sum(x, config.points(), |y| y.abs() < r)?;
    Ok(0.5 * spec.beta.value() * (sum - compensator(&EdgeDensity::limit(), r)?))
}

/// −β Σ_{|x−sᵢ|<r} 1/(x − sᵢ)².
pub fn drift_gradient(beta: Beta, x: f64, config: &PointConfiguration, r: f64) -> Result<f64> {
    let mut terms = Vec::new();
    for &y in config.points() {
        let d = x - y;
        if d.abs() <= COINCIDENCE {
            return Err(Error::Singularity(format!("evaluation point {x} coincides with a particle")));
        }
        if d.abs() < r {
            terms.push(d);
        }
    }
    terms.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
    Ok(-beta.value() * terms.iter().map(|d| 1.0 / (d * d)).sum::<f64>())
}

/// Principal value ∫_{|y|<r} ρ̂(y)/(x − y) dy, with paired nodes x ± t about
/// the singular point.
pub fn stieltjes(d: &EdgeDensity, x: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) || (r.is_infinite() && d.regime == Regime::Limit) {
        return Err(Error::Domain(format!("radius {r} not admissible for {:?}", d.regime)));
    }
    let (s_lo, s_hi) = d.support();
    let (a, b) = (s_lo.max(-r), s_hi.min(r));
    if !(a.is_finite() && a < b) {
        return Ok(0.0);
    }
    let panels = 40;
    if x <= a || x >= b {
        if x == a || x == b {
            return Err(Error::Singularity(format!("principal value at the interval end {x}")));
        }
        return Ok(d.integrate(a, b, panels, |y| 1.0 / (x - y)));
    }
    let h = (x - a).min(b - x);
    // t = h(1 − w²) absorbs square-root behaviour at t = h.
    let paired = crate::quad::composite(0.0, 1.0, 1.0 / 20.0, 20, |w| {
        let t = h * (1.0 - w * w);
        if t <= 0.0 {
            return 0.0;
        }
        (rho_hat(d, x - t) - rho_hat(d, x + t)) / t * 2.0 * h * w
    });
    let rest = if x - h > a {
        d.integrate(a, x - h, panels, |y| 1.0 / (x - y))
    } else {
        d.integrate(x + h, b, panels, |y| 1.0 / (x - y))
    };
    Ok(paired + rest)
}

/// −(x/π)∫_s^∞ dv/(√v(v + x)): what the truncated ρ̂ part of u_β misses.
fn semicircle_tail(x: f64, s: f64) -> f64 {
    -(x / PI) * inverse_sqrt_integral(x, s, f64::INFINITY)
}

/// ∫_a^b dv/(√v(v + x)) for a > max(−x, 0).
fn inverse_sqrt_integral(x: f64, a: f64, b: f64) -> f64 {
    let prim = |v: f64| -> f64 {
        if x > 0.0 {
            let r = x.sqrt();
            if v.is_infinite() {
                PI / r
            } else {
                2.0 / r * (v / x).sqrt().atan()
            }
        } else if x < 0.0 {
            let r = (-x).sqrt();
            if v.is_infinite() {
                0.0
            } else {
                let sv = v.sqrt();
                ((sv - r) / (sv + r)).ln() / r
            }
        } else if v.is_infinite() {
            0.0
        } else {
            -2.0 / v.sqrt()
        }
    };
    prim(b) - prim(a)
}

/// ∫ ρ̂(y)/(x − y) dy over y ∈ (−b, −a), 0 ≤ a < b, with x > −a.
fn semicircle_shell(x: f64, a: f64, b: f64) -> f64 {
    // √v/(v + x) = 1/√v − x/(√v(v + x)).
    if b <= a {
        return 0.0;
    }
    let plain = 2.0 * (b.sqrt() - a.sqrt());
    let twisted = if x == 0.0 { 0.0 } else { x * inverse_sqrt_integral(x, a.max(1e-300), b) };
    (plain - twisted) / PI
}

fn anchored(beta: Beta, regime: Regime, x: f64) -> Result<crate::kernels::Kernel> {
    KernelHandle::new(beta, regime).with_anchor(x).resolve()
}

fn limit_profile(beta: Beta, x: f64, depth: f64, breaks: &[f64]) -> Result<PalmProfile> {
    anchored(beta, Regime::Limit, x)?.palm_profile(-depth, f64::INFINITY, breaks)
}

fn shell_value(p: &PalmProfile, x: f64, s: f64) -> f64 {
    p.integrate(|y, r| if y.abs() < s { r / (x - y) } else { 0.0 }) - 2.0 * s.sqrt() / PI
}

/// ∫_{|y|<s} ρₓ(y)/(x − y) dy − 2√s/π for the limit kernels, without extrapolation.
pub fn u_beta_shell(beta: Beta, x: f64, s: f64) -> Result<f64> {
    if !(x.abs() < s) {
        return Err(Error::Precondition(format!("u_β needs x in (−s, s), got x = {x}, s = {s}")));
    }
    let p = limit_profile(beta, x, s, &[-s, s])?;
    Ok(shell_value(&p, x, s))
}

/// u_β(x) in the limit regime or u_βⁿ(x) at finite n.
///
/// Limit: the shell value at s plus the closed-form ρ̂ tail, with one
/// Richardson step in s^{−3/2} against s/4 (skipped when |x| ≥ s/4).
/// Finite n: ∫ ρₓⁿ(y)/(x − y) dy − n^{1/3} − n^{−1/3}x/2 over the support.
pub fn u_beta(beta: Beta, x: f64, s: f64, regime: Regime) -> Result<f64> {
    match regime {
        Regime::Finite(n) => {
            let p = anchored(beta, regime, x)?.palm_profile(f64::NEG_INFINITY, f64::INFINITY, &[])?;
            Ok(p.integrate(|y, r| r / (x - y)) - finite_compensator(n, x))
        }
        Regime::Limit => {
            if !(x.abs() < s) {
                return Err(Error::Precondition(format!("u_β needs x in (−s, s), got x = {x}, s = {s}")));
            }
            let q = 0.25 * s;
            let p = limit_profile(beta, x, s, &[-s, s, -q, q])?;
            let full = shell_value(&p, x, s) + semicircle_tail(x, s);
            if x.abs() >= q {
                return Ok(full);
            }
            let quarter = shell_value(&p, x, q) + semicircle_tail(x, q);
            if (full - quarter).abs() > SHELL_TOLERANCE {
                return Err(Error::Accuracy(format!(
                    "u_β shell values at s = {q} and {s} differ by {:e}",
                    full - quarter
                )));
            }
            Ok((8.0 * full - quarter) / 7.0)
        }
    }
}

/// Palm-density integrals about an anchor split at |x − y| = s, reused
/// across configurations.
#[derive(Debug, Clone)]
pub struct PalmSplit {
    pub beta: Beta,
    pub regime: Regime,
    pub anchor: f64,
    pub shell: f64,
    /// ∫_{|x−y|<s} ρₓ(y)/(x − y) dy.
    pub inner: f64,
    /// ∫_{|x−y|≥s} ρₓ(y)/(x − y) dy (finite n only).
    pub outer: Option<f64>,
}

impl PalmSplit {
    pub fn new(beta: Beta, regime: Regime, x: f64, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::Domain(format!("shell parameter must be positive, got {s}")));
        }
        let k = anchored(beta, regime, x)?;
        let (inner, outer) = match regime {
            Regime::Finite(_) => {
                let p = k.palm_profile(f64::NEG_INFINITY, f64::INFINITY, &[x - s, x + s])?;
                let inner = p.integrate(|y, r| if (x - y).abs() < s { r / (x - y) } else { 0.0 });
                let outer = p.integrate(|y, r| if (x - y).abs() >= s { r / (x - y) } else { 0.0 });
                (inner, Some(outer))
            }
            Regime::Limit => {
                let reach = s.min(PALM_PROFILE_RADIUS);
                let p = k.palm_profile(x - reach, f64::INFINITY, &[x - reach, x + reach])?;
                let mut inner = p.integrate(|y, r| if (x - y).abs() < reach { r / (x - y) } else { 0.0 });
                if s > reach {
                    // y ∈ (x − s, x − reach) written as v = −y.
                    inner += semicircle_shell(x, (reach - x).max(0.0), (s - x).max(0.0));
                }
                (inner, None)
            }
        };
        Ok(Self { beta, regime, anchor: x, shell: s, inner, outer })
    }

    /// g_{β,s}(x, y) = Σ_{|x−yⱼ|<s} 1/(x − yⱼ) − ∫_{|x−y|<s} ρₓ(y)/(x − y) dy.
    pub fn g(&self, config: &PointConfiguration) -> Result<f64> {
        let (x, s) = (self.anchor, self.shell);
        Ok(ordered_sum(x, config.points(), |y| (x - y).abs() < s)? - self.inner)
    }

    /// w_{β,s}(x, y) = Σ_{|x−yⱼ|≥s} 1/(x − yⱼ) − ∫_{|x−y|≥s} ρₓ(y)/(x − y) dy.
    pub fn w(&self, config: &PointConfiguration) -> Result<f64> {
        let Some(outer) = self.outer else {
            return Err(Error::Precondition("w is defined for finite-n Palm fields only".into()));
        };
        let (x, s) = (self.anchor, self.shell);
        Ok(ordered_sum(x, config.points(), |y| (x - y).abs() >= s)? - outer)
    }
}

/// g_{β,s}(x, config) (limit or finite Palm density).
pub fn g_term(beta: Beta, regime: Regime, s: f64, x: f64, config: &PointConfiguration) -> Result<f64> {
    PalmSplit::new(beta, regime, x, s)?.g(config)
}

/// wⁿ_{β,s}(x, config) for a configuration with the anchor removed.
pub fn w_term(beta: Beta, n: usize, s: f64, x: f64, config: &PointConfiguration) -> Result<f64> {
    PalmSplit::new(beta, Regime::Finite(n), x, s)?.w(config)
}

/// β{Σ_{|x−yⱼ|<s} 1/(x − yⱼ) − ∫_{|y|<s} ρ̂(y)/(−y) dy}.
pub fn log_derivative_route_a(beta: Beta, s: f64, x: f64, config: &PointConfiguration) -> Result<f64> {
    let sum = ordered_sum(x, config.points(), |y| (x - y).abs() < s)?;
    Ok(beta.value() * (sum - compensator(&EdgeDensity::limit(), s)?))
}

/// β{u_β(x) + g_{β,s}(x, config)} with the limit kernels.
pub fn log_derivative_route_b(beta: Beta, s: f64, x: f64, config: &PointConfiguration) -> Result<f64> {
    let u = u_beta(beta, x, DEFAULT_SHELL.max(4.0 * x.abs() + 1.0), Regime::Limit)?;
    Ok(beta.value() * (u + g_term(beta, Regime::Limit, s, x, config)?))
}

/// Logarithmic derivative under the compensator mode of `spec`.
pub fn log_derivative(spec: &DriftSpec, x: f64, config: &PointConfiguration) -> Result<f64> {
    spec.validate()?;
    let b = spec.beta.value();
    match spec.mode {
        CompensatorMode::Semicircle => {
            let sum = ordered_sum(x, config.points(), |y| y.abs() < spec.radius)?;
            Ok(b * (sum - compensator(&EdgeDensity::limit(), spec.radius)?))
        }
        CompensatorMode::FiniteN { n } => Ok(b * (ordered_sum(x, config.points(), |_| true)? - finite_compensator(n, x))),
        CompensatorMode::Palm => log_derivative_route_b(spec.beta, spec.radius, x, config),
    }
}

/// mⁿ_r = β∫_{|y|<r} ρ₀ⁿ(y)/(−y) dy (r = ∞ allowed).
pub fn m_n_r(beta: Beta, n: usize, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let k = anchored(beta, Regime::Finite(n), 0.0)?;
    let breaks: Vec<f64> = if r.is_finite() { vec![-r, r] } else { Vec::new() };
    let p = k.palm_profile(f64::NEG_INFINITY, f64::INFINITY, &breaks)?;
    Ok(beta.value() * p.integrate(|y, rho| if y.abs() < r { rho / (-y) } else { 0.0 }))
}

/// Φ_β(x) = β∫ₓ⁰ u_β(y) dy, so that Φ_β′ = −βu_β.
pub fn free_potential(beta: Beta, x: f64) -> Result<f64> {
    if !(x.abs() <= 50.0) {
        return Err(Error::Domain(format!("free potential needs |x| ≤ 50, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let panels = x.abs().ceil() as usize;
    let h = x / panels as f64;
    let rule = gauss_legendre(8);
    let mut nodes = Vec::with_capacity(panels * 8);
    for p in 0..panels {
        let (ys, ws) = rule.mapped(p as f64 * h, (p + 1) as f64 * h);
        nodes.extend(ys.into_iter().zip(ws));
    }
    let values: Vec<f64> = nodes
        .par_iter()
        .map(|(y, _)| u_beta(beta, *y, DEFAULT_SHELL, Regime::Limit))
        .collect::<Result<_>>()?;
    // ∫₀ˣ with signed weights; Φ = β∫ₓ⁰ = −β∫₀ˣ.
    let integral: f64 = nodes.iter().zip(&values).map(|((_, w), u)| w * u).sum();
    Ok(-beta.value() * integral)
}
