//! Quaternion kernels for β = 1 and β = 4.
//!
//! Both the limit and the finite-n kernels share the shape
//! J(x, y) = K(x, y) + f(x)(α G(y) + γ) with K a scalar kernel, G′ = g, and
//!
//! * ∂_y J(x, y) = ∂_y K(x, y) + α f(x) g(y),
//! * I(x, y) = ∫_y^x J(u, y) du = ∫_y^x K(u, y) du + (α G(y) + γ) ∫_y^x f.
//!
//! β = 1 uses the block [[J, −∂_yJ], [I − ½ sgn(x − y), J(y, x)]];
//! β = 4 uses ½[[J, −∂_yJ], [I, J(y, x)]] in the doubled scaling, mapped
//! back by X = 2^{2/3}x with Jacobian 2^{2/3}.

use super::divided::{self, Jet, Potential};
use super::scalar::{AiryKernel, HermiteKernel, HermitePoint, ScalarKernel};
use crate::error::Result;
use crate::quaternion::Quaternion;
use crate::specfun::{airy_state, psi_total_integral, OscillatorIndex, OscillatorTail};

/// 2^{2/3}.
pub(crate) const SYMPLECTIC_SCALE: f64 = 1.587_401_051_968_199_5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Symmetry {
    Orthogonal,
    Symplectic,
}

#[derive(Debug, Clone)]
enum Parts {
    /// f = Ai, G = 1 − T (β = 1) or G = T with α < 0 (β = 4), T(y) = ∫_y^∞ Ai.
    Airy { tail_sign: f64 },
    /// f = ψ_{N−1}^k, G = εψ_N^k.
    Hermite {
        kernel: HermiteKernel,
        lower: OscillatorTail,
        upper: OscillatorTail,
    },
}

/// J-kernel of one of the four quaternion families.
#[derive(Debug, Clone)]
pub(crate) struct JKernel {
    symmetry: Symmetry,
    parts: Parts,
    alpha: f64,
    gamma: f64,
}

/// J, ∂_yJ and I at one ordered pair, in the kernel's own coordinates.
#[derive(Debug, Clone, Copy)]
pub(crate) struct JValues {
    pub j: f64,
    pub dj: f64,
    pub int: f64,
}

impl JKernel {
    pub fn limit(symmetry: Symmetry) -> Self {
        match symmetry {
            Symmetry::Orthogonal => Self {
                symmetry,
                parts: Parts::Airy { tail_sign: -1.0 },
                alpha: 0.5,
                gamma: 0.0,
            },
            Symmetry::Symplectic => Self {
                symmetry,
                parts: Parts::Airy { tail_sign: 1.0 },
                alpha: -0.5,
                gamma: 0.0,
            },
        }
    }

    /// β = 1: K^{n,n} with ψⁿ_{n−1}, εψⁿ_n and the odd-n term.
    /// β = 4: K^{2n+1,2n} with ψ^{2n}_{2n} and εψ^{2n}_{2n+1}.
    pub fn finite(symmetry: Symmetry, n: usize) -> Result<Self> {
        let (top, scale) = match symmetry {
            Symmetry::Orthogonal => (n, n),
            Symmetry::Symplectic => (2 * n + 1, 2 * n),
        };
        let kernel = HermiteKernel::new(top, scale);
        let lower = OscillatorTail::new(OscillatorIndex::new(top - 1, scale)?)?;
        let upper = OscillatorTail::new(OscillatorIndex::new(top, scale)?)?;
        let (alpha, gamma) = match symmetry {
            Symmetry::Orthogonal => {
                let gamma = if n % 2 == 1 {
                    1.0 / psi_total_integral(n - 1, n)
                } else {
                    0.0
                };
                (0.5, gamma)
            }
            Symmetry::Symplectic => {
                let nf = n as f64;
                ((2.0 * nf + 1.0).sqrt() / (2.0 * (2.0 * nf).sqrt()), 0.0)
            }
        };
        Ok(Self {
            symmetry,
            parts: Parts::Hermite { kernel, lower, upper },
            alpha,
            gamma,
        })
    }

    /// Coordinate map into the kernel's own variables.
    #[inline]
    fn coord(&self, x: f64) -> f64 {
        match self.symmetry {
            Symmetry::Orthogonal => x,
            Symmetry::Symplectic => SYMPLECTIC_SCALE * x,
        }
    }

    /// J, ∂_yJ and I in the kernel's own coordinates.
    pub fn parts(&self, x: f64, y: f64) -> JValues {
        match &self.parts {
            Parts::Airy { tail_sign } => {
                let sx = airy_state(x);
                let sy = airy_state(y);
                let k = AiryKernel;
                // G(y) = 1 − T(y) (sign −1) or T(y) (sign +1); G′ = −sign·Ai.
                let (g_val, g_der) = if *tail_sign < 0.0 {
                    (1.0 - sy[2], sy[0])
                } else {
                    (sy[2], -sy[0])
                };
                let coef = self.alpha * g_val + self.gamma;
                JValues {
                    j: k.value(x, y) + sx[0] * coef,
                    dj: k.dy(x, y) + self.alpha * sx[0] * g_der,
                    int: k.integral(y, x, y) + coef * (sy[2] - sx[2]),
                }
            }
            Parts::Hermite { kernel, lower, upper } => {
                let px = kernel.point(x);
                let py = kernel.point(y);
                let g_val = upper.epsilon(y);
                let coef = self.alpha * g_val + self.gamma;
                JValues {
                    j: kernel.value_at(&px, &py) + px.lower * coef,
                    dj: kernel.dy_at(&px, &py) + self.alpha * px.lower * py.top,
                    int: kernel.integral(y, x, y) + coef * lower.integral(y, x),
                }
            }
        }
    }

    /// J(x, y) alone, in the kernel's own coordinates.
    pub fn j(&self, x: f64, y: f64) -> f64 {
        match &self.parts {
            Parts::Airy { tail_sign } => {
                let sx = airy_state(x);
                let sy = airy_state(y);
                let g_val = if *tail_sign < 0.0 { 1.0 - sy[2] } else { sy[2] };
                AiryKernel.value(x, y) + sx[0] * (self.alpha * g_val + self.gamma)
            }
            Parts::Hermite { kernel, upper, .. } => {
                let px = kernel.point(x);
                let py = kernel.point(y);
                kernel.value_at(&px, &py) + px.lower * (self.alpha * upper.epsilon(y) + self.gamma)
            }
        }
    }

    /// Quaternion kernel at soft-edge points (x, y).
    pub fn quaternion(&self, x: f64, y: f64) -> Quaternion {
        let (u, v) = (self.coord(x), self.coord(y));
        let p = self.parts(u, v);
        let j_rev = self.j(v, u);
        match self.symmetry {
            Symmetry::Orthogonal => {
                let sgn = 0.5 * sign(u - v);
                Quaternion::from_real_block(p.j, -p.dj, p.int - sgn, j_rev)
            }
            Symmetry::Symplectic => {
                let c = 0.5 * SYMPLECTIC_SCALE;
                Quaternion::from_real_block(c * p.j, -c * p.dj, c * p.int, c * j_rev)
            }
        }
    }

    /// One-point density: scalar part of the diagonal, ½(J(x,x) + J(x,x)) scaled.
    pub fn density(&self, x: f64) -> f64 {
        let u = self.coord(x);
        let j = self.j(u, u);
        match self.symmetry {
            Symmetry::Orthogonal => j,
            Symmetry::Symplectic => 0.5 * SYMPLECTIC_SCALE * j,
        }
    }

    /// [K(y, x) K(x, y)]⁽⁰⁾ from the J-form
    /// J(x,y)J(y,x) − ∂_yJ(x,y)(∫_x^y J(u,x)du − ½ sgn(y − x)),
    /// with the β = 4 normalisation (2^{2/3}/2)².
    pub fn l_product(&self, x: f64, y: f64) -> f64 {
        let (u, v) = (self.coord(x), self.coord(y));
        let anchor = self.anchor(u);
        let terms = self.ray(&anchor, v);
        let k_int = match &self.parts {
            Parts::Airy { .. } => AiryKernel.integral(u, v, u),
            Parts::Hermite { kernel, .. } => kernel.integral(u, v, u),
        };
        self.l_from_ray(&anchor, &terms, k_int)
    }

    /// Ray anchor in the kernel's own coordinates.
    pub fn anchor(&self, u: f64) -> RayAnchor {
        match &self.parts {
            Parts::Airy { tail_sign } => {
                let s = airy_state(u);
                let g = if *tail_sign < 0.0 { 1.0 - s[2] } else { s[2] };
                RayAnchor {
                    u,
                    f: s[0],
                    coef: self.alpha * g + self.gamma,
                    point: None,
                }
            }
            Parts::Hermite { kernel, upper, .. } => {
                let p = kernel.point(u);
                RayAnchor {
                    u,
                    f: p.lower,
                    coef: self.alpha * upper.epsilon(u) + self.gamma,
                    point: Some(p),
                }
            }
        }
    }

    /// Everything but ∫_u^v K(w, u) dw needed for the L-product and the
    /// density at v, seen from the anchor u.
    pub fn ray(&self, a: &RayAnchor, v: f64) -> RayTerms {
        match &self.parts {
            Parts::Airy { tail_sign } => {
                let su = airy_state(a.u);
                let sv = airy_state(v);
                let k = AiryKernel;
                let (g_val, g_der) = if *tail_sign < 0.0 {
                    (1.0 - sv[2], sv[0])
                } else {
                    (sv[2], -sv[0])
                };
                let coef_v = self.alpha * g_val + self.gamma;
                let k_vu = k.value(v, a.u);
                RayTerms {
                    k_vu,
                    j_uv: k_vu + a.f * coef_v,
                    dj_uv: k.dy(a.u, v) + self.alpha * a.f * g_der,
                    j_vu: k_vu + sv[0] * a.coef,
                    j_vv: k.value(v, v) + sv[0] * coef_v,
                    f_int: su[2] - sv[2],
                    v,
                }
            }
            Parts::Hermite { kernel, lower, upper } => {
                let pu = a.point.expect("Hermite anchor carries its point");
                let pv = kernel.point(v);
                let coef_v = self.alpha * upper.epsilon(v) + self.gamma;
                let k_vu = kernel.value_at(&pv, &pu);
                RayTerms {
                    k_vu,
                    j_uv: k_vu + a.f * coef_v,
                    dj_uv: kernel.dy_at(&pu, &pv) + self.alpha * a.f * pv.top,
                    j_vu: k_vu + pv.lower * a.coef,
                    j_vv: kernel.value_at(&pv, &pv) + pv.lower * coef_v,
                    f_int: lower.integral(a.u, v),
                    v,
                }
            }
        }
    }

    /// L-product from ray terms and k_int = ∫_u^v K(w, u) dw (own coordinates).
    pub fn l_from_ray(&self, a: &RayAnchor, t: &RayTerms, k_int: f64) -> f64 {
        let int = k_int + a.coef * t.f_int;
        match self.symmetry {
            Symmetry::Orthogonal => t.j_uv * t.j_vu - t.dj_uv * (int - 0.5 * sign(t.v - a.u)),
            Symmetry::Symplectic => {
                let c = 0.5 * SYMPLECTIC_SCALE;
                c * c * (t.j_uv * t.j_vu - t.dj_uv * int)
            }
        }
    }

    /// One-point density at v from ray terms.
    pub fn density_from_ray(&self, t: &RayTerms) -> f64 {
        match self.symmetry {
            Symmetry::Orthogonal => t.j_vv,
            Symmetry::Symplectic => 0.5 * SYMPLECTIC_SCALE * t.j_vv,
        }
    }

    /// Soft-edge to own-coordinate factor.
    pub fn coord_scale(&self) -> f64 {
        self.coord(1.0)
    }

    /// Frequency bound of K(·, u) on [lo, hi] (own coordinates).
    pub fn omega(&self, lo: f64, hi: f64) -> f64 {
        match &self.parts {
            Parts::Airy { .. } => crate::kernels::divided::Potential::AIRY.omega_max(lo, hi),
            Parts::Hermite { kernel, .. } => kernel.omega(lo, hi),
        }
    }

    /// Interval outside which the kernel is negligible (own coordinates).
    pub fn support(&self) -> Option<(f64, f64)> {
        match &self.parts {
            Parts::Airy { .. } => None,
            Parts::Hermite { kernel, .. } => Some(kernel.support()),
        }
    }
}

/// Anchor data reused along a ray.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RayAnchor {
    pub u: f64,
    f: f64,
    coef: f64,
    point: Option<HermitePoint>,
}

/// Kernel values between an anchor u and a point v (own coordinates).
#[derive(Debug, Clone, Copy)]
pub(crate) struct RayTerms {
    /// K(v, u), the integrand of the cumulative integral.
    pub k_vu: f64,
    j_uv: f64,
    dj_uv: f64,
    j_vu: f64,
    j_vv: f64,
    f_int: f64,
    v: f64,
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Per-node data for whole kernel columns (own coordinates).
#[derive(Debug, Clone, Copy)]
pub(crate) struct NodeData {
    u: f64,
    /// f(u).
    f: f64,
    /// α G(u) + γ.
    coef: f64,
    /// G′(u).
    g_der: f64,
    /// ∫_u^R f for a fixed reference R.
    tail: f64,
    scalar: ScalarNode,
}

#[derive(Debug, Clone, Copy)]
enum ScalarNode {
    Airy(Jet),
    Hermite(HermitePoint),
}

impl JKernel {
    pub fn node(&self, u: f64) -> NodeData {
        match &self.parts {
            Parts::Airy { tail_sign } => {
                let s = airy_state(u);
                let (g_val, g_der) = if *tail_sign < 0.0 { (1.0 - s[2], s[0]) } else { (s[2], -s[0]) };
                NodeData {
                    u,
                    f: s[0],
                    coef: self.alpha * g_val + self.gamma,
                    g_der,
                    tail: s[2],
                    scalar: ScalarNode::Airy(Jet { x: u, v: s[0], d: s[1] }),
                }
            }
            Parts::Hermite { kernel, lower, upper } => {
                let p = kernel.point(u);
                NodeData {
                    u,
                    f: p.lower,
                    coef: self.alpha * upper.epsilon(u) + self.gamma,
                    g_der: p.top,
                    tail: lower.integral(u, 0.0),
                    scalar: ScalarNode::Hermite(p),
                }
            }
        }
    }

    /// Scalar kernel K(x, y) and ∂_yK(x, y) from cached nodes.
    fn scalar_pair(&self, x: &NodeData, y: &NodeData) -> (f64, f64) {
        match (&self.parts, x.scalar, y.scalar) {
            (Parts::Airy { .. }, ScalarNode::Airy(a), ScalarNode::Airy(b)) => {
                (divided::value(&Potential::AIRY, a, b), divided::dy(&Potential::AIRY, a, b))
            }
            (Parts::Hermite { kernel, .. }, ScalarNode::Hermite(a), ScalarNode::Hermite(b)) => {
                (kernel.value_at(&a, &b), kernel.dy_at(&a, &b))
            }
            _ => unreachable!("node data from another kernel"),
        }
    }

    /// Column K(·, y_j) at all nodes. `cumulative` maps the column of
    /// scalar-kernel values to ∫ from the first node, in own coordinates.
    pub fn column<C>(&self, nodes: &[NodeData], j: usize, cumulative: C) -> Vec<Quaternion>
    where
        C: Fn(&[f64]) -> Vec<f64>,
    {
        let y = &nodes[j];
        let pairs: Vec<(f64, f64)> = nodes.iter().map(|x| self.scalar_pair(x, y)).collect();
        let k: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let c = cumulative(&k);
        nodes
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let (kxy, dkxy) = pairs[i];
                let j_xy = kxy + x.f * y.coef;
                let dj = dkxy + self.alpha * x.f * y.g_der;
                let int = (c[i] - c[j]) + y.coef * (y.tail - x.tail);
                let j_yx = kxy + y.f * x.coef;
                match self.symmetry {
                    Symmetry::Orthogonal => {
                        Quaternion::from_real_block(j_xy, -dj, int - 0.5 * sign(x.u - y.u), j_yx)
                    }
                    Symmetry::Symplectic => {
                        let s = 0.5 * SYMPLECTIC_SCALE;
                        Quaternion::from_real_block(s * j_xy, -s * dj, s * int, s * j_yx)
                    }
                }
            })
            .collect()
    }
}
