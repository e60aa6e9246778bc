//! Normalised Hermite oscillator functions in soft-edge coordinates.
//!
//! φₖ(t) = e^{−t²/4} Heₖ(t) / √(√(2π) k!) and
//! ψₖᵐ(x) = m^{1/12} φₖ(2√m + x m^{−1/6}).

use crate::error::{check_finite, Error, Result};
use crate::quad;

/// Largest Hermite degree accepted by default.
pub const DEFAULT_N_MAX: usize = 2000;

const RENORM_EVERY: usize = 64;

/// Degree `n` and soft-edge scaling parameter `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OscillatorIndex {
    pub n: usize,
    pub m: usize,
}

impl OscillatorIndex {
    /// ψₙ = ψₙⁿ (scaling parameter equal to the degree; m = 1 when n = 0).
    pub fn diagonal(n: usize) -> Self {
        Self { n, m: n.max(1) }
    }

    pub fn new(n: usize, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("scaling index m must be ≥ 1".into()));
        }
        Ok(Self { n, m })
    }

    fn check(&self, n_max: usize) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Domain("scaling index m must be ≥ 1".into()));
        }
        if self.n > n_max {
            return Err(Error::Capability(format!(
                "oscillator degree {} exceeds N_max = {n_max}",
                self.n
            )));
        }
        Ok(())
    }
}

/// Hermite argument t = 2√m + x m^{−1/6}.
#[inline]
pub fn hermite_argument(m: usize, x: f64) -> f64 {
    let mf = m as f64;
    2.0 * mf.sqrt() + x * mf.powf(-1.0 / 6.0)
}

/// Runs the three-term recurrence in scaled form and hands each φₖ to `sink`.
///
/// Values are carried as mantissa × e^{log_scale}; the pair is renormalised
/// every 64 steps so no intermediate overflows for degrees in the thousands.
fn recurrence<F: FnMut(usize, f64)>(top: usize, t: f64, mut sink: F) {
    let mut log_scale = -0.25 * t * t - 0.25 * (2.0 * std::f64::consts::PI).ln();
    let mut prev = 0.0;
    let mut cur = 1.0;
    sink(0, log_scale.exp());
    for k in 0..top {
        let kf = k as f64;
        let next = (t * cur - kf.sqrt() * prev) / (kf + 1.0).sqrt();
        prev = cur;
        cur = next;
        if (k + 1) % RENORM_EVERY == 0 || cur.abs() > 1e150 {
            let mag = cur.abs().max(prev.abs());
            if mag > 0.0 && mag.is_finite() {
                log_scale += mag.ln();
                cur /= mag;
                prev /= mag;
            }
        }
        sink(k + 1, cur * log_scale.exp());
    }
}

/// φ₀(t), …, φ_top(t).
pub fn phi_ladder(top: usize, t: f64) -> Vec<f64> {
    let mut out = vec![0.0; top + 1];
    recurrence(top, t, |k, v| out[k] = v);
    out
}

/// ψ₀ᵐ(x), …, ψ_topᵐ(x).
pub fn psi_ladder(top: usize, m: usize, x: f64) -> Vec<f64> {
    let c = (m as f64).powf(1.0 / 12.0);
    let mut out = phi_ladder(top, hermite_argument(m, x));
    for v in out.iter_mut() {
        *v *= c;
    }
    out
}

/// (φ_{n−1}, φₙ, φ_{n+1}) at t; φ_{−1} is taken as 0.
pub fn phi_triple(n: usize, t: f64) -> (f64, f64, f64) {
    let mut trip = [0.0; 3];
    recurrence(n + 1, t, |k, v| {
        if k + 1 >= n && k <= n + 1 {
            trip[k + 1 - n] = v;
        }
    });
    if n == 0 {
        trip[0] = 0.0;
    }
    (trip[0], trip[1], trip[2])
}

/// (ψᵐ_{n−1}, ψᵐₙ, ψᵐ_{n+1}) at x; ψᵐ_{−1} is taken as 0.
pub fn psi_triple(n: usize, m: usize, x: f64) -> (f64, f64, f64) {
    let c = (m as f64).powf(1.0 / 12.0);
    let (a, b, d) = phi_triple(n, hermite_argument(m, x));
    (c * a, c * b, c * d)
}

/// ψₙᵐ(x) and its x-derivative, unchecked.
#[inline]
pub(crate) fn psi_and_prime(n: usize, m: usize, x: f64) -> (f64, f64) {
    let (lo, mid, hi) = psi_triple(n, m, x);
    let nf = n as f64;
    let d = (m as f64).powf(-1.0 / 6.0) * 0.5 * (nf.sqrt() * lo - (nf + 1.0).sqrt() * hi);
    (mid, d)
}

/// ψₙᵐ(x) with N_max = 2000.
pub fn oscillator_psi(idx: OscillatorIndex, x: f64) -> Result<f64> {
    oscillator_psi_with_limit(idx, x, DEFAULT_N_MAX)
}

/// ψₙᵐ(x) with a caller-supplied degree cap.
pub fn oscillator_psi_with_limit(idx: OscillatorIndex, x: f64, n_max: usize) -> Result<f64> {
    idx.check(n_max)?;
    check_finite(x, "oscillator argument")?;
    Ok(psi_triple(idx.n, idx.m, x).1)
}

/// (ψₙᵐ)′(x) = m^{−1/6}(√n ψᵐ_{n−1} − √(n+1) ψᵐ_{n+1})/2.
pub fn oscillator_psi_prime(idx: OscillatorIndex, x: f64) -> Result<f64> {
    idx.check(DEFAULT_N_MAX)?;
    check_finite(x, "oscillator argument")?;
    Ok(psi_and_prime(idx.n, idx.m, x).1)
}

/// Coefficients (a, b, c) with (ψₙᵐ)″ = (a x² + b x + c) ψₙᵐ.
pub fn psi_potential(n: usize, m: usize) -> [f64; 3] {
    // φ″ = (t²/4 − n − ½) φ with t = 2√m + x m^{−1/6}, dt/dx = m^{−1/6}.
    let mf = m as f64;
    let s = mf.powf(-1.0 / 6.0);
    let r = mf.sqrt();
    let w = s * s;
    [w * s * s / 4.0, w * r * s, w * (mf - n as f64 - 0.5)]
}

/// ∫ℝ ψₙᵐ, in closed form: 0 for odd n,
/// m^{1/4} · 2√π √((2k)!) / (2ᵏ k! (2π)^{1/4}) for n = 2k.
pub fn psi_total_integral(n: usize, m: usize) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let k = n / 2;
    let ln_fact = |j: usize| (1..=j).map(|i| (i as f64).ln()).sum::<f64>();
    let pi = std::f64::consts::PI;
    let ln = (2.0 * pi.sqrt()).ln() + 0.5 * ln_fact(n) - k as f64 * 2f64.ln() - ln_fact(k)
        - 0.25 * (2.0 * pi).ln();
    (m as f64).powf(0.25) * ln.exp()
}

/// Cached tail integrals ∫ₓ^∞ ψₙᵐ on panels between the turning points.
///
/// Panel boundaries include both turning points; oscillatory panels are no
/// wider than about a quarter wavelength. Each panel is integrated by
/// adaptive Gauss–Kronrod.
#[derive(Debug, Clone)]
pub struct OscillatorTail {
    idx: OscillatorIndex,
    edges: Vec<f64>,
    tails: Vec<f64>,
    total: f64,
}

impl OscillatorTail {
    pub fn new(idx: OscillatorIndex) -> Result<Self> {
        idx.check(DEFAULT_N_MAX)?;
        let (n, m) = (idx.n, idx.m);
        let mf = m as f64;
        let s6 = mf.powf(1.0 / 6.0);
        let tp = 2.0 * (n as f64 + 0.5).sqrt();
        let x_lo_turn = (-tp - 2.0 * mf.sqrt()) * s6;
        let x_hi_turn = (tp - 2.0 * mf.sqrt()) * s6;
        let margin = 16.0 * (mf / (n as f64 + 1.0)).powf(1.0 / 6.0) + 6.0;
        let lo = x_lo_turn - margin;
        let hi = x_hi_turn + margin;
        let pot = psi_potential(n, m);
        let omega_max = (-(pot[2] - pot[1] * pot[1] / (4.0 * pot[0]))).max(1.0).sqrt();
        let width = (1.5 / omega_max).min(0.5);

        let mut edges = Vec::new();
        let push_range = |a: f64, b: f64, w: f64, edges: &mut Vec<f64>| {
            let k = ((b - a) / w).ceil().max(1.0) as usize;
            for i in 0..k {
                edges.push(a + (b - a) * i as f64 / k as f64);
            }
        };
        push_range(lo, x_lo_turn, 1.0, &mut edges);
        push_range(x_lo_turn, x_hi_turn, width, &mut edges);
        push_range(x_hi_turn, hi, 1.0, &mut edges);
        edges.push(hi);

        let mut tails = vec![0.0; edges.len()];
        for j in (0..edges.len() - 1).rev() {
            let (v, _) = quad::adaptive(
                |u| psi_triple(n, m, u).1,
                edges[j],
                edges[j + 1],
                1e-15,
                1e-13,
            )?;
            tails[j] = tails[j + 1] + v;
        }
        Ok(Self {
            idx,
            edges,
            tails,
            total: psi_total_integral(n, m),
        })
    }

    pub fn index(&self) -> OscillatorIndex {
        self.idx
    }

    /// ∫ℝ ψ from the closed form.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// ∫ₓ^∞ ψ.
    pub fn tail(&self, x: f64) -> f64 {
        let last = self.edges.len() - 1;
        if x >= self.edges[last] {
            return 0.0;
        }
        if x <= self.edges[0] {
            // Lower decay region: what is left below the panels is negligible.
            return self.total;
        }
        let j = self.edges.partition_point(|&e| e <= x) - 1;
        let (n, m) = (self.idx.n, self.idx.m);
        let rule = quad::gauss_legendre(20);
        rule.integrate(x, self.edges[j + 1], |u| psi_triple(n, m, u).1) + self.tails[j + 1]
    }

    /// ∫_a^b ψ.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.tail(a) - self.tail(b)
    }

    /// (εψ)(x) = ½∫ψ − ∫ₓ^∞ψ.
    pub fn epsilon(&self, x: f64) -> f64 {
        0.5 * self.total - self.tail(x)
    }
}

/// (εψₙᵐ)(x) = ½∫ψₙᵐ − ∫ₓ^∞ψₙᵐ.
pub fn epsilon_psi(idx: OscillatorIndex, x: f64) -> Result<f64> {
    check_finite(x, "epsilon argument")?;
    Ok(OscillatorTail::new(idx)?.epsilon(x))
}

/// Angle θ, amplitude function f and phase g of the leading
/// Plancherel–Rotach term at soft-edge coordinate x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlancherelRotach {
    pub theta: f64,
    pub f: f64,
    pub g: f64,
    pub value: f64,
}

/// Default exponent ε of the oscillatory window (−2n^{2/3}, −n^ε).
pub const PR_WINDOW_EXPONENT: f64 = 0.25;

/// Leading oscillatory asymptotics of ψₙ in the window (−2n^{2/3}, −n^ε):
/// π^{−1/2} f^{−1/4} cos(g − θ/2 − π/4), where
/// x = 2n^{1/6}(√(n+1) cos θ − √n), f = n^{2/3} sin²θ and
/// g = (n+1)(2θ − sin 2θ)/2.
pub fn plancherel_rotach_leading(n: usize, x: f64, window_exponent: f64) -> Result<PlancherelRotach> {
    check_finite(x, "Plancherel–Rotach argument")?;
    if n == 0 {
        return Err(Error::Domain("degree must be positive".into()));
    }
    let nf = n as f64;
    let lo = -2.0 * nf.powf(2.0 / 3.0);
    let hi = -nf.powf(window_exponent);
    if !(x > lo && x < hi) {
        return Err(Error::Domain(format!(
            "x = {x} outside the oscillatory window ({lo}, {hi})"
        )));
    }
    // Leading coefficients of the expansion: a₀₀ = 1, a₁₀ = 0.
    const A00: f64 = 1.0;
    let cos_t = (x / (2.0 * nf.powf(1.0 / 6.0)) + nf.sqrt()) / (nf + 1.0).sqrt();
    let theta = cos_t.acos();
    let f = nf.powf(2.0 / 3.0) * theta.sin().powi(2);
    let g = 0.5 * (nf + 1.0) * (2.0 * theta - (2.0 * theta).sin());
    let pi = std::f64::consts::PI;
    let value = A00 * f.powf(-0.25) * (g - 0.5 * theta - 0.25 * pi).cos() / pi.sqrt();
    Ok(PlancherelRotach { theta, f, g, value })
}
