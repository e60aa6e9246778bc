//! Semicircle law and the soft-edge reference densities
//! ρ̂(x) = √(−x)/π on (−∞, 0) and ρ̂ⁿ(x) = √(−x(1 + x/4n^{2/3}))/π on (−4n^{2/3}, 0).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::Regime;
use crate::quad::gauss_legendre;

/// Reference density of one regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeDensity {
    pub regime: Regime,
}

impl EdgeDensity {
    pub fn finite(n: usize) -> Self {
        Self { regime: Regime::Finite(n) }
    }

    pub fn limit() -> Self {
        Self { regime: Regime::Limit }
    }

    /// Length 4n^{2/3} of the finite support, ∞ in the limit.
    pub fn width(&self) -> f64 {
        match self.regime {
            Regime::Finite(n) => 4.0 * (n as f64).powf(2.0 / 3.0),
            Regime::Limit => f64::INFINITY,
        }
    }

    /// Support (lower, upper).
    pub fn support(&self) -> (f64, f64) {
        (-self.width(), 0.0)
    }

    pub fn value(&self, x: f64) -> f64 {
        rho_hat(self, x)
    }

    /// ∫_lo^hi ρ̂(x) f(x) dx with endpoint-smoothing substitutions.
    ///
    /// Finite n uses x = −L sin²θ (L = 4n^{2/3}), which turns ρ̂ⁿ dx into the
    /// smooth (2L^{3/2}/π) sin²θ cos²θ dθ; the limit uses x = −u², giving
    /// (2u²/π) du.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, panels: usize, mut f: F) -> f64 {
        let (s_lo, s_hi) = self.support();
        let lo = lo.max(s_lo);
        let hi = hi.min(s_hi);
        if hi <= lo {
            return 0.0;
        }
        let rule = gauss_legendre(20);
        let panels = panels.max(1);
        match self.regime {
            Regime::Finite(_) => {
                let l = self.width();
                let theta = |x: f64| (-x / l).clamp(0.0, 1.0).sqrt().asin();
                // θ decreases as x increases.
                let (t0, t1) = (theta(hi), theta(lo));
                let h = (t1 - t0) / panels as f64;
                let c = 2.0 * l.powf(1.5) / PI;
                let mut acc = 0.0;
                for p in 0..panels {
                    let a = t0 + p as f64 * h;
                    acc += rule.integrate(a, a + h, |t| {
                        let (s, co) = t.sin_cos();
                        c * s * s * co * co * f(-l * s * s)
                    });
                }
                acc
            }
            Regime::Limit => {
                let (u0, u1) = ((-hi).max(0.0).sqrt(), (-lo).sqrt());
                let h = (u1 - u0) / panels as f64;
                let mut acc = 0.0;
                for p in 0..panels {
                    let a = u0 + p as f64 * h;
                    acc += rule.integrate(a, a + h, |u| 2.0 * u * u / PI * f(-u * u));
                }
                acc
            }
        }
    }
}

/// ρ̂ (limit) or ρ̂ⁿ (finite n) at x.
pub fn rho_hat(d: &EdgeDensity, x: f64) -> f64 {
    if !(x < 0.0) {
        return 0.0;
    }
    match d.regime {
        Regime::Limit => (-x).sqrt() / PI,
        Regime::Finite(_) => {
            let l = d.width();
            if x <= -l {
                0.0
            } else {
                (-x * (1.0 + x / l)).sqrt() / PI
            }
        }
    }
}

/// ∫_{|x|<r} ρ̂(x)/(−x) dx.
///
/// Limit: 2√r/π. Finite n: with x = −L sin²θ the integrand becomes
/// (2√L/π) cos²θ, so the value is (2√L/π)(Θ/2 + sin 2Θ/4) with
/// Θ = asin √(min(r, L)/L); the full range gives n^{1/3}.
pub fn compensator(d: &EdgeDensity, r: f64) -> Result<f64> {
    if r.is_nan() || r <= 0.0 {
        return Err(Error::Domain(format!("compensator radius must be positive, got {r}")));
    }
    match d.regime {
        Regime::Limit => {
            if r.is_infinite() {
                Err(Error::Domain("the limit compensator diverges as r → ∞".into()))
            } else {
                Ok(2.0 * r.sqrt() / PI)
            }
        }
        Regime::Finite(_) => {
            let l = d.width();
            let theta = (r.min(l) / l).sqrt().asin();
            Ok(2.0 * l.sqrt() / PI * (0.5 * theta + 0.25 * (2.0 * theta).sin()))
        }
    }
}

/// ∫_{|x|<r} ρ̂(x) dx.
pub fn mass(d: &EdgeDensity, r: f64) -> f64 {
    match d.regime {
        Regime::Limit => 2.0 * r.powf(1.5) / (3.0 * PI),
        Regime::Finite(_) => {
            let l = d.width();
            let theta = (r.min(l) / l).sqrt().asin();
            // (2L^{3/2}/π) ∫₀^Θ sin²θ cos²θ dθ = (2L^{3/2}/π)(Θ/8 − sin 4Θ/32).
            2.0 * l.powf(1.5) / PI * (theta / 8.0 - (4.0 * theta).sin() / 32.0)
        }
    }
}

/// Wigner semicircle (1/2π)√(4 − x²) on (−2, 2).
pub fn semicircle(x: f64) -> f64 {
    if x.abs() < 2.0 {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_mass_is_n() {
        for n in [1usize, 8, 27, 100] {
            let d = EdgeDensity::finite(n);
            assert!((mass(&d, f64::INFINITY) - n as f64).abs() < 1e-10 * n as f64);
        }
    }

    #[test]
    fn limit_compensator_rejects_infinity() {
        assert!(compensator(&EdgeDensity::limit(), f64::INFINITY).is_err());
        assert!(compensator(&EdgeDensity::limit(), -1.0).is_err());
    }
}
