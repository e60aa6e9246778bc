use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{below, decreasing, BoundReport, Ceilings, ReportBuilder};
use crate::error::{Error, Result};
use crate::kernels::{Beta, Kernel, KernelHandle, KernelValue, PanelGrid};
use crate::quad::gauss_legendre;
use crate::quaternion::Quaternion;
use crate::sampler::DppSampler;
use crate::specfun::psi_ladder;

/// Fewer draws than this make the variance check inconclusive.
pub const MIN_MC_COUNT: usize = 200;
const ORDER_1D: usize = 16;
const ORDER_2D: usize = 8;
/// Panels stay below this many radians of the fastest oscillation.
const PHASE_1D: f64 = 5.0;
const PHASE_2D: f64 = 2.5;
const SECTION: f64 = 8.0;

/// Contiguous panels on [a, b], shrinking like 1/√|u| where the finite-n
/// functions oscillate; `speed` scales the local frequency.
fn oscillation_panels(a: f64, b: f64, phase: f64, speed: f64, out: &mut Vec<(f64, f64)>) {
    if b <= a {
        return;
    }
    let sections = ((b - a) / SECTION).ceil() as usize;
    let cut = |i: usize| if i == sections { b } else { a + i as f64 * (b - a) / sections as f64 };
    for i in 0..sections {
        let (lo, hi) = (cut(i), cut(i + 1));
        let reach = (-lo).max(1.0);
        let width = (phase / (speed * reach.sqrt())).min(0.5);
        let k = ((hi - lo) / width).ceil() as usize;
        let at = |p: usize| if p == k { hi } else { lo + p as f64 * (hi - lo) / k as f64 };
        out.extend((0..k).map(|p| (at(p), at(p + 1))));
    }
}

/// Nodes and weights on {u ∈ support : |x − u| > s}.
fn outside_nodes(support: (f64, f64), x: f64, s: f64, order: usize, phase: f64) -> (Vec<f64>, Vec<f64>) {
    let (lo, hi) = support;
    let mut panels = Vec::new();
    oscillation_panels(lo, hi.min(x - s), phase, 1.0, &mut panels);
    oscillation_panels(lo.max(x + s), hi, phase, 1.0, &mut panels);
    let rule = gauss_legendre(order);
    let (mut xs, mut ws) = (Vec::new(), Vec::new());
    for (a, b) in panels {
        let (x, w) = rule.mapped(a, b);
        xs.extend(x);
        ws.extend(w);
    }
    (xs, ws)
}

/// Panel grid on the whole support with panel ends at x ± s.
fn full_grid(support: (f64, f64), x: f64, s: f64, speed: f64) -> Result<PanelGrid> {
    let (lo, hi) = support;
    let mut cuts = vec![lo, hi];
    cuts.extend([x - s, x + s].into_iter().filter(|c| *c > lo && *c < hi));
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut panels = Vec::new();
    for w in cuts.windows(2) {
        oscillation_panels(w[0], w[1], PHASE_2D, speed, &mut panels);
    }
    PanelGrid::new(panels, ORDER_2D)
}

fn finite_support(kernel: &Kernel) -> Result<(f64, f64)> {
    let (lo, hi) = kernel.support();
    if lo.is_finite() && hi.is_finite() {
        Ok((lo, hi))
    } else {
        Err(Error::Capability("I-integrals are evaluated for finite n only".into()))
    }
}

fn quaternion(v: KernelValue) -> Quaternion {
    v.to_quaternion()
}

/// Iⁿ_{β,k}(x, s) by composite Gauss–Legendre quadrature over the support.
pub fn i_integral(kernel: &Kernel, k: usize, x: f64, s: f64) -> Result<f64> {
    if !(1..=6).contains(&k) {
        return Err(Error::Precondition(format!("k must lie in 1..=6, got {k}")));
    }
    if !(s > 0.0) {
        return Err(Error::Domain(format!("s must be positive, got {s}")));
    }
    let support = finite_support(kernel)?;
    if k <= 3 {
        let (us, ws) = outside_nodes(support, x, s, ORDER_1D, PHASE_1D);
        let total = us
            .par_iter()
            .zip(&ws)
            .map(|(&u, &w)| {
                let d = (x - u).abs();
                w * match k {
                    1 => kernel.density(u) / (d * d),
                    2 => kernel.l_product(x, u).abs() / (d * d),
                    _ => kernel.l_product(x, u).abs() / d,
                }
            })
            .sum::<f64>();
        return Ok(total + 0.0);
    }
    let speed = if kernel.handle().beta == Beta::Four { 2.0 } else { 1.0 };
    let grid = full_grid(support, x, s, speed)?;
    let columns = kernel.columns(&grid)?;
    let outside: Vec<usize> = (0..grid.len()).filter(|&i| (x - grid.nodes[i]).abs() > s).collect();
    let g: Vec<f64> = (0..grid.len()).map(|i| grid.weights[i] / (x - grid.nodes[i]).abs()).collect();
    let (to_x, from_x): (Vec<Quaternion>, Vec<Quaternion>) = if k == 4 {
        (Vec::new(), Vec::new())
    } else {
        grid.nodes
            .par_iter()
            .map(|&u| (quaternion(kernel.value(u, x)), quaternion(kernel.value(x, u))))
            .unzip()
    };
    let total: f64 = outside
        .par_iter()
        .map(|&j| {
            // Column j holds K(u_i, u_j); self-duality gives K(u_j, u_i) as its dual.
            let col = columns.column(j);
            let mut acc = 0.0;
            for &i in &outside {
                let kij = quaternion(col[i]);
                let kji = kij.conjugate();
                let term = match k {
                    4 => (kji * kij).scalar_part().re,
                    // K(u,x)K(x,v)K(v,u) with u = u_i, v = u_j.
                    5 => (to_x[i] * from_x[j] * kji).scalar_part().re,
                    // K(u,v)K(v,x)K(x,u).
                    _ => (kij * to_x[j] * from_x[i]).scalar_part().re,
                };
                acc += g[i] * term.abs();
            }
            g[j] * acc
        })
        .sum();
    Ok(total + 0.0)
}

/// Iⁿ_{β,k}(x, s) along `s_list`. Passes when the values are non-increasing
/// (strictly while positive) and the value at the largest s is below the
/// k-th ceiling. For k = 2 the ratio I/ρ¹(x) is reported as well.
pub fn evaluate_i_integrals(beta: Beta, n: usize, k: usize, x: f64, s_list: &[f64], ceilings: &Ceilings) -> Result<BoundReport> {
    if s_list.is_empty() {
        return Err(Error::Input("s_list is empty".into()));
    }
    if !(1..=6).contains(&k) {
        return Err(Error::Precondition(format!("k must lie in 1..=6, got {k}")));
    }
    let kernel = KernelHandle::finite(beta, n).resolve()?;
    let support = finite_support(&kernel)?;
    let mut report = ReportBuilder::new(
        "I-integrals",
        json!({ "beta": beta.as_u8(), "n": n, "k": k, "x": x, "s": s_list }),
        json!({ "support": [support.0, support.1], "order_1d": ORDER_1D, "order_2d": ORDER_2D }),
    );
    let rho_x = kernel.density(x);
    let mut values = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let v = i_integral(&kernel, k, x, s)?;
        report.value("I", s, v);
        if k == 2 {
            report.value("I_over_density", s, v / rho_x);
        }
        values.push(v);
    }
    let mut order: Vec<usize> = (0..s_list.len()).collect();
    order.sort_by(|&a, &b| s_list[a].partial_cmp(&s_list[b]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    report.check("decreasing in s", decreasing(&sorted), format!("{sorted:?}"));
    let last = *sorted.last().unwrap();
    let (ok, detail) = below(ceilings.i_integral.map(|c| c[k - 1]), last);
    report.check("largest s below ceiling", ok, detail);
    Ok(report.finish())
}

/// The compensator ∫ρₓ(y)/(x − y) dy and Var w over |x − y| > s for the
/// finite-n β = 2 Palm field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WMoments {
    pub compensator: f64,
    pub variance: f64,
}

/// With K(u, v) = f(u)ᵀf(v) and P the projection onto f(x)^⊥, the Palm
/// kernel is fᵀPf. Setting M = ∫ f fᵀ/(x − u) and M₂ = ∫ f fᵀ/(x − u)²
/// over |x − u| > s, the compensator is tr(PM) and the variance is
/// tr(PM₂) − tr(PMPM).
pub fn w_moments(n: usize, x: f64, s: f64) -> Result<WMoments> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("s must be positive, got {s}")));
    }
    let kernel = KernelHandle::finite(Beta::Two, n).with_anchor(x).resolve()?;
    let support = finite_support(&kernel)?;
    let scale = (n as f64).powf(-1.0 / 6.0);
    let basis = |u: f64| DVector::from_iterator(n, psi_ladder(n - 1, n, u).into_iter().map(|p| p * scale));
    let (us, ws) = outside_nodes(support, x, s, ORDER_1D, PHASE_1D);
    let (m1, m2) = us
        .par_iter()
        .zip(&ws)
        .map(|(&u, &w)| {
            let f = basis(u);
            let outer = &f * f.transpose();
            let g = w / (x - u);
            (&outer * g, &outer * (g / (x - u)))
        })
        .reduce(
            || (DMatrix::zeros(n, n), DMatrix::zeros(n, n)),
            |a, b| (a.0 + b.0, a.1 + b.1),
        );
    let v = basis(x);
    let p = DMatrix::identity(n, n) - &v * v.transpose() / v.norm_squared();
    let pm = &p * &m1;
    Ok(WMoments { compensator: pm.trace(), variance: (&p * &m2).trace() - (&pm * &pm).trace() })
}

/// Monte Carlo variance of w over Palm draws from the discretised sampler
/// against the quadrature value, for finite-n β = 2.
///
/// w(𝐲) = Σ_{|x−yᵢ|≥s} 1/(x − yᵢ) − ∫_{|x−y|≥s} ρₓ(y)/(x − y) dy. Passes when
/// the sample variance is within 3 standard errors (from the sample fourth
/// moment) of the quadrature and the sample mean within 3 standard errors of 0.
pub fn variance_check(n: usize, x: f64, s: f64, mc_count: usize, seed: u64, grid_per_unit: usize) -> Result<BoundReport> {
    let handle = KernelHandle::finite(Beta::Two, n).with_anchor(x);
    let support = finite_support(&handle.resolve()?)?;
    let mut report = ReportBuilder::new(
        "variance",
        json!({ "beta": 2, "n": n, "x": x, "s": s, "mc_count": mc_count, "seed": seed }),
        json!({ "window": [support.0, support.1], "grid_per_unit": grid_per_unit }),
    );
    let moments = w_moments(n, x, s)?;
    report.value("quadrature_variance", s, moments.variance);
    report.value("compensator", s, moments.compensator);
    if mc_count < MIN_MC_COUNT {
        report.inconclusive(format!("{mc_count} draws < {MIN_MC_COUNT}"));
        return Ok(report.finish());
    }
    let sampler = DppSampler::new(&handle, support, grid_per_unit)?;
    let samples = sampler.sample_many(mc_count, seed)?;
    let ws: Vec<f64> = samples
        .iter()
        .map(|c| {
            c.points().iter().filter(|y| (x - *y).abs() >= s).map(|y| 1.0 / (x - y)).sum::<f64>() - moments.compensator
        })
        .collect();
    let count = ws.len() as f64;
    let mean = ws.iter().sum::<f64>() / count;
    let var = ws.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (count - 1.0);
    let m4 = ws.iter().map(|w| (w - mean).powi(4)).sum::<f64>() / count;
    let var_se = ((m4 - var * var).max(0.0) / count).sqrt();
    let mean_se = (var / count).sqrt();
    report.value("mc_variance", s, var);
    report.value("mc_variance_se", s, var_se);
    report.value("mc_mean", s, mean);
    report.value("mc_mean_se", s, mean_se);
    let z = (var - moments.variance).abs() / var_se;
    report.check("variance agrees", z <= 3.0, format!("|Δ| = {z:.3} standard errors"));
    let zm = mean.abs() / mean_se;
    report.check("mean is zero", zm <= 3.0, format!("|mean| = {zm:.3} standard errors"));
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outside_nodes_integrate_lengths() {
        let (_, ws) = outside_nodes((-40.0, 6.0), 0.5, 2.0, 16, 5.0);
        let total: f64 = ws.iter().sum();
        assert!((total - (46.0 - 4.0)).abs() < 1e-10);
        let (us, _) = outside_nodes((-40.0, 6.0), 0.0, 100.0, 16, 5.0);
        assert!(us.is_empty());
    }
}
