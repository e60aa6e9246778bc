//! Scalar (β = 2 type) kernels: the Airy kernel and the Hermite kernels
//! K^{N,k}(x, y) = k^{−1/3} Σ_{m<N} ψᵐ_k(x) ψᵐ_k(y) in soft-edge coordinates.

use super::divided::{self, Jet, Potential};
use crate::quad;
use crate::specfun::{airy_state, psi_potential, psi_triple};

/// Common interface of the scalar kernels used as building blocks.
pub(crate) trait ScalarKernel: Send + Sync {
    fn value(&self, x: f64, y: f64) -> f64;
    /// ∂K/∂y.
    fn dy(&self, x: f64, y: f64) -> f64;
    /// ∫_a^b K(u, y) du.
    fn integral(&self, a: f64, b: f64, y: f64) -> f64;
    /// Interval outside which the kernel is negligible; None when unbounded below.
    fn support(&self) -> Option<(f64, f64)>;
    /// Local angular frequency bound of K(·, y) on [lo, hi].
    fn omega(&self, lo: f64, hi: f64) -> f64;
}

/// K_Ai(x, y) = [Ai(x)Ai′(y) − Ai′(x)Ai(y)]/(x − y).
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct AiryKernel;

fn airy_jet(x: f64) -> Jet {
    let s = airy_state(x);
    Jet { x, v: s[0], d: s[1] }
}

impl ScalarKernel for AiryKernel {
    fn value(&self, x: f64, y: f64) -> f64 {
        divided::value(&Potential::AIRY, airy_jet(x), airy_jet(y))
    }

    fn dy(&self, x: f64, y: f64) -> f64 {
        divided::dy(&Potential::AIRY, airy_jet(x), airy_jet(y))
    }

    fn integral(&self, a: f64, b: f64, y: f64) -> f64 {
        let yj = airy_jet(y);
        let (lo, hi) = (a.min(b), a.max(b));
        // Above x = 40 the integrand is below 1e-100.
        let hi_eff = hi.min(40.0_f64.max(lo));
        let v = quad::oscillatory(
            lo,
            hi_eff,
            |l, h| Potential::AIRY.omega_max(l, h),
            |u| divided::value(&Potential::AIRY, airy_jet(u), yj),
        );
        if a <= b {
            v
        } else {
            -v
        }
    }

    fn support(&self) -> Option<(f64, f64)> {
        None
    }

    fn omega(&self, lo: f64, hi: f64) -> f64 {
        Potential::AIRY.omega_max(lo, hi)
    }
}

/// ψ_{N−1}, ψ_N and ψ_N′ at one point (scaling parameter k).
#[derive(Debug, Clone, Copy)]
pub(crate) struct HermitePoint {
    pub x: f64,
    pub lower: f64,
    pub top: f64,
    pub top_prime: f64,
}

/// K^{N,k} in soft-edge coordinates of scaling parameter k.
///
/// With ψ = ψ_N^k and D_ψ its divided difference,
/// K^{N,k}(x, y) = D_ψ(x, y) − ½ k^{−1/3} ψ(x)ψ(y).
#[derive(Debug, Clone, Copy)]
pub(crate) struct HermiteKernel {
    top: usize,
    scale: usize,
    pot: Potential,
    half_shift: f64,
    deriv_scale: f64,
}

impl HermiteKernel {
    pub fn new(top: usize, scale: usize) -> Self {
        let p = psi_potential(top, scale);
        let kf = scale as f64;
        Self {
            top,
            scale,
            pot: Potential { a: p[0], b: p[1], c: p[2] },
            half_shift: 0.5 * kf.powf(-1.0 / 3.0),
            deriv_scale: kf.powf(-1.0 / 6.0),
        }
    }

    /// K^{n,n}, the finite-n β = 2 kernel.
    pub fn diagonal(n: usize) -> Self {
        Self::new(n, n)
    }

    pub fn point(&self, x: f64) -> HermitePoint {
        let (lo, mid, hi) = psi_triple(self.top, self.scale, x);
        let nf = self.top as f64;
        let d = self.deriv_scale * 0.5 * (nf.sqrt() * lo - (nf + 1.0).sqrt() * hi);
        HermitePoint { x, lower: lo, top: mid, top_prime: d }
    }

    fn jet(p: &HermitePoint) -> Jet {
        Jet { x: p.x, v: p.top, d: p.top_prime }
    }

    pub fn value_at(&self, px: &HermitePoint, py: &HermitePoint) -> f64 {
        divided::value(&self.pot, Self::jet(px), Self::jet(py)) - self.half_shift * px.top * py.top
    }

    pub fn dy_at(&self, px: &HermitePoint, py: &HermitePoint) -> f64 {
        divided::dy(&self.pot, Self::jet(px), Self::jet(py)) - self.half_shift * px.top * py.top_prime
    }

    /// Christoffel–Darboux ratio form (N^{1/2}/k^{1/6})[ψ_N(x)ψ_{N−1}(y) − ψ_{N−1}(x)ψ_N(y)]/(x − y).
    pub fn ratio_form(&self, x: f64, y: f64) -> f64 {
        let (a, b) = (self.point(x), self.point(y));
        let c = (self.top as f64).sqrt() * self.deriv_scale;
        c * (a.top * b.lower - a.lower * b.top) / (x - y)
    }

    /// k^{−1/3} Σ_{m<N} ψ_m^k(x) ψ_m^k(y).
    pub fn sum_form(&self, x: f64, y: f64) -> f64 {
        if self.top == 0 {
            return 0.0;
        }
        let a = crate::specfun::psi_ladder(self.top - 1, self.scale, x);
        let b = crate::specfun::psi_ladder(self.top - 1, self.scale, y);
        let s: f64 = a.iter().zip(&b).map(|(u, v)| u * v).sum();
        s * self.deriv_scale * self.deriv_scale
    }

    /// Support margin: beyond these points the kernel is negligible.
    pub fn support(&self) -> (f64, f64) {
        let kf = self.scale as f64;
        let s6 = kf.powf(1.0 / 6.0);
        let tp = 2.0 * (self.top as f64 + 0.5).sqrt();
        let lo = (-tp - 2.0 * kf.sqrt()) * s6;
        let hi = (tp - 2.0 * kf.sqrt()) * s6;
        let margin = 14.0 * (kf / (self.top as f64 + 1.0)).powf(1.0 / 6.0) + 8.0;
        (lo - margin, hi + margin)
    }

    /// Local angular frequency bound of ψ_N on [lo, hi].
    pub fn omega(&self, lo: f64, hi: f64) -> f64 {
        self.pot.omega_max(lo, hi)
    }
}

impl ScalarKernel for HermiteKernel {
    fn value(&self, x: f64, y: f64) -> f64 {
        self.value_at(&self.point(x), &self.point(y))
    }

    fn dy(&self, x: f64, y: f64) -> f64 {
        self.dy_at(&self.point(x), &self.point(y))
    }

    fn integral(&self, a: f64, b: f64, y: f64) -> f64 {
        let py = self.point(y);
        let (s_lo, s_hi) = self.support();
        let lo = a.min(b).max(s_lo.min(y));
        let hi = a.max(b).min(s_hi.max(y));
        if hi <= lo {
            return 0.0;
        }
        let v = quad::oscillatory(
            lo,
            hi,
            |l, h| self.omega(l, h),
            |u| self.value_at(&self.point(u), &py),
        );
        if a <= b {
            v
        } else {
            -v
        }
    }

    fn support(&self) -> Option<(f64, f64)> {
        Some(HermiteKernel::support(self))
    }

    fn omega(&self, lo: f64, hi: f64) -> f64 {
        HermiteKernel::omega(self, lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_and_divided_forms_agree() {
        let k = HermiteKernel::diagonal(12);
        for &(x, y) in &[(0.3, -1.2), (-4.0, 1.0), (-7.5, -7.0)] {
            let a = k.value(x, y);
            let b = k.ratio_form(x, y);
            assert!((a - b).abs() < 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn airy_kernel_diagonal() {
        let v = AiryKernel.value(0.0, 0.0);
        let d = crate::specfun::AIP0;
        assert!((v - d * d).abs() < 1e-15);
    }
}
