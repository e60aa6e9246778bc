//! Extended Airy kernel and the single-time Fredholm gap probability.

use nalgebra::DMatrix;

use super::divided::Potential;
use super::scalar::{AiryKernel, ScalarKernel};
use crate::error::{check_finite, Error, Result};
use crate::quad;
use crate::specfun::ai;

/// Extended Airy kernel K(s, x; t, y):
///
/// * s ≤ t: ∫₀^∞ e^{−(t−s)v/2} Ai(x+v) Ai(y+v) dv,
/// * s > t: −∫₀^∞ e^{(t−s)u/2} Ai(x−u) Ai(y−u) du.
pub fn extended_airy_kernel(s: f64, x: f64, t: f64, y: f64) -> Result<f64> {
    for (v, name) in [(s, "s"), (x, "x"), (t, "t"), (y, "y")] {
        check_finite(v, name)?;
    }
    if s <= t {
        let rate = 0.5 * (t - s);
        // Ai(z)² < 1e-40 for z > 16.
        let end = (16.0 - x.min(y)).max(0.0);
        let omega = |l: f64, h: f64| {
            let lo = x.min(y) + l;
            2.0 * Potential::AIRY.omega_max(lo, lo + (h - l))
        };
        Ok(quad::oscillatory(0.0, end, omega, |v| {
            (-rate * v).exp() * ai(x + v) * ai(y + v)
        }))
    } else {
        let rate = 0.5 * (s - t);
        // Truncate where e^{−rate·u} < 1e-14; |Ai| ≤ 0.54.
        let end = 32.3 / rate + (x.max(y) - 16.0).max(0.0);
        let (lo, hi) = (x.min(y), x.max(y));
        let omega = |l: f64, h: f64| 2.0 * Potential::AIRY.omega_max(lo - h, hi - l);
        Ok(-quad::oscillatory(0.0, end, omega, |u| {
            (-rate * u).exp() * ai(x - u) * ai(y - u)
        }))
    }
}

/// Default Nyström order for the gap probability.
pub const DEFAULT_GAP_ORDER: usize = 60;

/// Scale of the map w ↦ s + L·w/(1 − w) from (0, 1) onto (s, ∞).
const GAP_MAP_SCALE: f64 = 6.0;

/// F₂(s) = det(I − K_Ai)|_{L²(s,∞)} by Nyström discretisation.
///
/// Gauss–Legendre nodes on (0, 1) are pushed to (s, ∞) by
/// u = s + L·w/(1 − w); the matrix is √wᵢ K(uᵢ, uⱼ) √wⱼ.
pub fn fredholm_gap(s: f64, quad_order: usize) -> Result<f64> {
    check_finite(s, "gap threshold")?;
    if !(10..=200).contains(&quad_order) {
        return Err(Error::Precondition(format!(
            "quad_order must lie in [10, 200], got {quad_order}"
        )));
    }
    let rule = quad::gauss_legendre(quad_order);
    let (w_nodes, w_weights) = rule.mapped(0.0, 1.0);
    let mut nodes = Vec::with_capacity(quad_order);
    let mut roots = Vec::with_capacity(quad_order);
    for (w, wt) in w_nodes.iter().zip(&w_weights) {
        let u = s + GAP_MAP_SCALE * w / (1.0 - w);
        let jac = GAP_MAP_SCALE / ((1.0 - w) * (1.0 - w));
        nodes.push(u);
        roots.push((wt * jac).sqrt());
    }
    let k = AiryKernel;
    let m = DMatrix::from_fn(quad_order, quad_order, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - roots[i] * k.value(nodes[i], nodes[j]) * roots[j]
    });
    let det = m.determinant();
    Ok(det.clamp(0.0, 1.0))
}

/// Fredholm determinant for a handle; only β = 2 in the limit regime is supported.
pub fn fredholm_gap_for(beta: u8, s: f64, quad_order: usize) -> Result<f64> {
    if beta != 2 {
        return Err(Error::Capability(format!(
            "gap probability is implemented for β = 2 only (got β = {beta})"
        )));
    }
    fredholm_gap(s, quad_order)
}
