//! One-point density of the reduced Palm field, ρₓ(y) = ρ(y) − L(x, y)/ρ(x),
//! tabulated on Gauss–Legendre panels that march outward from the anchor.
//!
//! For β = 1, 4 the L-product needs ∫_x^y K(u, x) du at every node; the
//! panels carry it cumulatively with a spectral integration matrix.

use rayon::prelude::*;

use super::blocks::{JKernel, RayAnchor, RayTerms};
use super::{Base, Kernel};
use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, integration_matrix};

const PANEL_ORDER: usize = 16;
const MAX_PANEL: f64 = 1.0;
/// Radians of the fastest oscillation allowed per panel.
const PHASE_PER_PANEL: f64 = 8.0;
/// Above max(anchor, 0) + this the limit densities are below 1e-30.
const LIMIT_UPPER_MARGIN: f64 = 16.0;

/// ρ and ρₓ on quadrature nodes in ascending order.
#[derive(Debug, Clone)]
pub struct PalmProfile {
    pub anchor: f64,
    pub anchor_density: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// ρ¹ at the nodes.
    pub density: Vec<f64>,
    /// ρ¹ₓ at the nodes.
    pub palm_density: Vec<f64>,
    /// Range actually covered after clipping to the kernel's support.
    pub range: (f64, f64),
}

impl PalmProfile {
    /// Σ w_i f(y_i, ρₓ(y_i)).
    pub fn integrate<F: FnMut(f64, f64) -> f64>(&self, mut f: F) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.nodes.len() {
            acc += self.weights[i] * f(self.nodes[i], self.palm_density[i]);
        }
        acc
    }

    /// Σ w_i f(y_i, ρ(y_i)) for the unreduced density.
    pub fn integrate_base<F: FnMut(f64, f64) -> f64>(&self, mut f: F) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.nodes.len() {
            acc += self.weights[i] * f(self.nodes[i], self.density[i]);
        }
        acc
    }
}

struct Panel {
    lo: f64,
    hi: f64,
}

struct PanelValues {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    density: Vec<f64>,
    /// L(x, y) without the cumulative-integral contribution (scalar kernels)
    /// or the data needed to finish it (quaternion kernels).
    partial: Vec<Partial>,
    /// ∫_lo^{t_i} K(u, x) du in own coordinates, and the panel total.
    running: Vec<f64>,
    total: f64,
}

enum Partial {
    Done(f64),
    Ray(RayTerms),
}

impl Kernel {
    /// Tabulates ρ and ρₓ on [lo, hi] (clipped to the kernel's support).
    ///
    /// Panel boundaries include the anchor, the range ends and every point of
    /// `breaks` inside the range, so indicator functions with jumps at those
    /// points integrate exactly.
    pub fn palm_profile(&self, lo: f64, hi: f64, breaks: &[f64]) -> Result<PalmProfile> {
        let Some((x, rho_x)) = self.anchor else {
            return Err(Error::Precondition("Palm profile needs an anchored kernel handle".into()));
        };
        if !(lo <= x && x <= hi) {
            return Err(Error::Precondition(format!(
                "Palm profile range [{lo}, {hi}] must contain the anchor {x}"
            )));
        }
        let (s_lo, s_hi) = self.support();
        let lo = lo.max(s_lo);
        let hi = hi.min(s_hi.max(x));
        if !lo.is_finite() {
            return Err(Error::Domain("Palm profile for the limit kernels needs a finite lower end".into()));
        }

        let mut cuts: Vec<f64> = breaks.iter().copied().filter(|b| *b > lo && *b < hi).collect();
        cuts.extend([lo, hi, x]);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

        let mut up = Vec::new();
        let mut down = Vec::new();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a >= x {
                self.split(a, b, &mut up);
            } else {
                self.split(a, b, &mut down);
            }
        }
        // March away from the anchor on both sides.
        down.reverse();

        let ray_anchor = match &self.base {
            Base::Quaternion(j) => Some(j.anchor(j.coord_scale() * x)),
            Base::Scalar(_) => None,
        };
        let ra = ray_anchor.as_ref();
        let up_vals: Vec<PanelValues> = up.par_iter().map(|p| self.panel_values(p, ra)).collect();
        let down_vals: Vec<PanelValues> = down.par_iter().map(|p| self.panel_values(p, ra)).collect();

        let mut profile = PalmProfile {
            anchor: x,
            anchor_density: rho_x,
            nodes: Vec::new(),
            weights: Vec::new(),
            density: Vec::new(),
            palm_density: Vec::new(),
            range: (lo, hi),
        };
        let mut lower_part = Vec::new();
        let mut carry = 0.0;
        for pv in &down_vals {
            let mut block = Vec::with_capacity(pv.nodes.len());
            for i in 0..pv.nodes.len() {
                // ∫_x^y = −∫_y^x = carry − (total − running).
                let k_int = carry - (pv.total - pv.running[i]);
                block.push((pv.nodes[i], pv.weights[i], pv.density[i], self.finish(&pv.partial[i], ra, k_int)));
            }
            carry -= pv.total;
            lower_part.push(block);
        }
        for block in lower_part.into_iter().rev() {
            for (y, w, d, l) in block {
                profile.push(y, w, d, l);
            }
        }
        carry = 0.0;
        for pv in &up_vals {
            for i in 0..pv.nodes.len() {
                let k_int = carry + pv.running[i];
                let l = self.finish(&pv.partial[i], ra, k_int);
                profile.push(pv.nodes[i], pv.weights[i], pv.density[i], l);
            }
            carry += pv.total;
        }
        for (p, d) in profile.palm_density.iter_mut().zip(&profile.density) {
            *p = d - *p / rho_x;
        }
        Ok(profile)
    }

    /// Soft-edge interval outside which the densities are negligible.
    pub fn support(&self) -> (f64, f64) {
        let x = self.anchor.map(|a| a.0).unwrap_or(0.0);
        match &self.base {
            Base::Scalar(k) => match k.support() {
                Some(s) => s,
                None => (f64::NEG_INFINITY, x.max(0.0) + LIMIT_UPPER_MARGIN),
            },
            Base::Quaternion(j) => match j.support() {
                Some((a, b)) => {
                    let c = j.coord_scale();
                    (a / c, b / c)
                }
                None => (f64::NEG_INFINITY, x.max(0.0) + LIMIT_UPPER_MARGIN),
            },
        }
    }

    /// Angular frequency bound of ρ on [lo, hi] in soft-edge coordinates.
    fn density_frequency(&self, lo: f64, hi: f64) -> f64 {
        match &self.base {
            Base::Scalar(k) => 2.0 * k.omega(lo, hi),
            Base::Quaternion(j) => {
                let c = j.coord_scale();
                2.0 * c * j.omega(c * lo, c * hi)
            }
        }
    }

    fn split(&self, a: f64, b: f64, out: &mut Vec<Panel>) {
        let mut y = a;
        while y < b {
            let probe = (y + MAX_PANEL).min(b);
            let w = (PHASE_PER_PANEL / self.density_frequency(y, probe).max(1e-6)).min(MAX_PANEL);
            let rest = b - y;
            let next = if rest <= w {
                b
            } else if rest < 2.0 * w {
                y + 0.5 * rest
            } else {
                y + w
            };
            out.push(Panel { lo: y, hi: next });
            y = next;
        }
    }

    fn panel_values(&self, p: &Panel, ray_anchor: Option<&RayAnchor>) -> PanelValues {
        let rule = gauss_legendre(PANEL_ORDER);
        let (nodes, weights) = rule.mapped(p.lo, p.hi);
        let x = self.anchor.expect("anchored").0;
        match &self.base {
            Base::Scalar(k) => {
                let density: Vec<f64> = nodes.iter().map(|&y| k.value(y, y)).collect();
                let partial = nodes
                    .iter()
                    .map(|&y| {
                        let v = k.value(x, y);
                        Partial::Done(v * v)
                    })
                    .collect();
                PanelValues {
                    running: vec![0.0; nodes.len()],
                    total: 0.0,
                    nodes,
                    weights,
                    density,
                    partial,
                }
            }
            Base::Quaternion(j) => {
                let anchor = ray_anchor.expect("quaternion kernels carry a ray anchor");
                quaternion_panel(j, anchor, p, nodes, weights)
            }
        }
    }

    fn finish(&self, partial: &Partial, ray_anchor: Option<&RayAnchor>, k_int: f64) -> f64 {
        match (partial, &self.base, ray_anchor) {
            (Partial::Done(v), _, _) => *v,
            (Partial::Ray(t), Base::Quaternion(j), Some(a)) => j.l_from_ray(a, t, k_int),
            _ => unreachable!("ray terms only arise for quaternion kernels"),
        }
    }
}

fn quaternion_panel(j: &JKernel, anchor: &RayAnchor, p: &Panel, nodes: Vec<f64>, weights: Vec<f64>) -> PanelValues {
    let c = j.coord_scale();
    let terms: Vec<_> = nodes.iter().map(|&y| j.ray(anchor, c * y)).collect();
    let density = terms.iter().map(|t| j.density_from_ray(t)).collect();
    // Own-coordinate panel: dw = c dy.
    let half = 0.5 * c * (p.hi - p.lo);
    let m = integration_matrix(PANEL_ORDER);
    let running = (0..nodes.len())
        .map(|i| half * m[i].iter().zip(&terms).map(|(a, t)| a * t.k_vu).sum::<f64>())
        .collect();
    let total = c * weights.iter().zip(&terms).map(|(w, t)| w * t.k_vu).sum::<f64>();
    PanelValues {
        nodes,
        weights,
        density,
        partial: terms.into_iter().map(Partial::Ray).collect(),
        running,
        total,
    }
}

impl PalmProfile {
    fn push(&mut self, y: f64, w: f64, d: f64, l: f64) {
        self.nodes.push(y);
        self.weights.push(w);
        self.density.push(d);
        // Holds L until the final pass converts it to ρₓ.
        self.palm_density.push(l);
    }
}
