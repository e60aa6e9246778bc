//! Divided-difference kernels D(x, y) = [A(x)A′(y) − A′(x)A(y)]/(x − y)
//! for a solution A of A″ = q A with quadratic q. The Airy kernel and the
//! Christoffel–Darboux form of the Hermite kernels are both of this type.

/// q(x) = a x² + b x + c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Potential {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Below this separation the value uses a Taylor expansion.
pub(crate) const DIAGONAL_SWITCH: f64 = 1e-4;
/// Below this separation the y-derivative uses its Taylor series.
const DERIVATIVE_SWITCH: f64 = 2e-2;

impl Potential {
    pub const AIRY: Potential = Potential { a: 0.0, b: 1.0, c: 0.0 };

    #[inline]
    pub fn q(&self, x: f64) -> f64 {
        (self.a * x + self.b) * x + self.c
    }

    #[inline]
    fn dq(&self, x: f64) -> f64 {
        2.0 * self.a * x + self.b
    }

    /// Upper bound of the local angular frequency √max(−q, 0) on [lo, hi].
    pub fn omega_max(&self, lo: f64, hi: f64) -> f64 {
        let mut qmin = self.q(lo).min(self.q(hi));
        if self.a > 0.0 {
            let v = -self.b / (2.0 * self.a);
            if v > lo && v < hi {
                qmin = qmin.min(self.q(v));
            }
        }
        (-qmin).max(0.0).sqrt()
    }

    /// A, A′, …, A^{(count−1)} at x from A(x) and A′(x).
    fn derivatives(&self, x: f64, a0: f64, a1: f64, count: usize) -> Vec<f64> {
        let q = [self.q(x), self.dq(x), 2.0 * self.a];
        let mut d = vec![0.0; count.max(2)];
        d[0] = a0;
        d[1] = a1;
        // A^{(j+2)} = Σ_{i ≤ 2} C(j, i) q^{(i)} A^{(j−i)}
        for j in 0..count.saturating_sub(2) {
            let mut s = q[0] * d[j];
            if j >= 1 {
                s += j as f64 * q[1] * d[j - 1];
            }
            if j >= 2 {
                s += (j * (j - 1) / 2) as f64 * q[2] * d[j - 2];
            }
            d[j + 2] = s;
        }
        d.truncate(count);
        d
    }
}

/// A value of A and A′ at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Jet {
    pub x: f64,
    pub v: f64,
    pub d: f64,
}

/// D(x, y), with a three-term Taylor expansion about y when |x − y| < 1e-4.
pub(crate) fn value(p: &Potential, x: Jet, y: Jet) -> f64 {
    let h = x.x - y.x;
    if h.abs() >= DIAGONAL_SWITCH {
        return (x.v * y.d - x.d * y.v) / h;
    }
    // D = G′ + G″h/2 + G‴h²/6 with G(u) = A(u)A′(y) − A′(u)A(y).
    let (a, ad) = (y.v, y.d);
    let q = p.q(y.x);
    let q1 = p.dq(y.x);
    let q2 = 2.0 * p.a;
    let g1 = ad * ad - q * a * a;
    let g2 = -q1 * a * a;
    let g3 = q * g1 - q1 * a * ad - q2 * a * a;
    g1 + 0.5 * g2 * h + g3 * h * h / 6.0
}

/// ∂D/∂y at (x, y); Taylor series about x when |x − y| < 2e-2.
pub(crate) fn dy(p: &Potential, x: Jet, y: Jet) -> f64 {
    if (x.x - y.x).abs() >= DERIVATIVE_SWITCH {
        dy_direct(p, x, y)
    } else {
        dy_series(p, x, y)
    }
}

fn dy_direct(p: &Potential, x: Jet, y: Jet) -> f64 {
    let h = x.x - y.x;
    let d = (x.v * y.d - x.d * y.v) / h;
    (p.q(y.x) * x.v * y.v - x.d * y.d) / h + d / h
}

fn dy_series(p: &Potential, x: Jet, y: Jet) -> f64 {
    let h = x.x - y.x;
    // ∂_y D(x, y) = Σ_{k≥1} G^{(k+1)}(x) k (y − x)^{k−1}/(k+1)!,
    // G^{(j)}(x) = A^{(j)}(x)A′(x) − A^{(j+1)}(x)A(x).
    const TERMS: usize = 24;
    let der = p.derivatives(x.x, x.v, x.d, TERMS + 3);
    let t = -h;
    let mut sum = 0.0;
    let mut pow = 1.0; // t^{k−1}
    let mut fact = 2.0; // (k+1)!
    for k in 1..=TERMS {
        let g = der[k + 1] * x.d - der[k + 2] * x.v;
        let term = g * k as f64 * pow / fact;
        sum += term;
        if k > 4 && term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        pow *= t;
        fact *= (k + 2) as f64;
    }
    sum
}
