//! Airy function of the first kind on the real line.
//!
//! Near the origin (|x| ≤ 4.5) the Maclaurin series is summed directly.
//! Outside, values come from a table of Taylor expansion points spaced
//! 1/16 apart, built once by high-order Taylor stepping of the system
//! Ai″ = x·Ai, (∫ₓ^∞Ai)′ = −Ai:
//!
//! * forwards from the exact origin values towards −∞ (oscillatory, stable);
//! * backwards from x = 36 towards the origin for x > 0, so that the
//!   recessive solution dominates, then normalised against the series at x = 2.

use std::sync::OnceLock;

use crate::error::{check_finite, Result};

/// Ai(0) = 3^{−2/3}/Γ(2/3).
pub const AI0: f64 = 0.355_028_053_887_817_24;
/// Ai′(0) = −3^{−1/3}/Γ(1/3).
pub const AIP0: f64 = -0.258_819_403_792_806_8;

const SERIES_RADIUS: f64 = 4.5;
const NODES_PER_UNIT: f64 = 16.0;
const NEG_TABLE_END: usize = 1600; // x = −100
const POS_TABLE_START: usize = 32; // x = 2
const POS_TABLE_END: usize = 544; // x = 34
const BACKWARD_START: f64 = 36.0;

/// Ai and Ai′ at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValue {
    pub ai: f64,
    pub ai_prime: f64,
}

/// (Ai, Ai′, ∫ₓ^∞Ai) carried together by the stepping scheme.
type State = [f64; 3];

/// Sums the Taylor expansion of the state about `x0` at offset `h`.
fn taylor(x0: f64, s: State, h: f64) -> State {
    let (mut a_km1, mut a_k) = (0.0, s[0]); // a_{k−1}, a_k
    let mut a_kp1 = s[1];
    let mut y = 0.0;
    let mut yp = 0.0;
    let mut tail = s[2];
    let mut hk = 1.0; // h^k
    let mut quiet = 0;
    for k in 0..400usize {
        let kf = k as f64;
        let ty = a_k * hk;
        let typ = a_kp1 * (kf + 1.0) * hk;
        let ti = -a_k * hk * h / (kf + 1.0);
        y += ty;
        yp += typ;
        tail += ti;
        let scale = y.abs().max(yp.abs() * h.abs()).max(1e-300);
        if ty.abs() + typ.abs() * h.abs() + ti.abs() <= 1e-18 * scale {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        // a_{k+2} = (x0 a_k + a_{k−1}) / ((k+1)(k+2))
        let a_kp2 = (x0 * a_k + a_km1) / ((kf + 1.0) * (kf + 2.0));
        a_km1 = a_k;
        a_k = a_kp1;
        a_kp1 = a_kp2;
        hk *= h;
    }
    [y, yp, tail]
}

fn march(x0: f64, mut s: State, x1: f64) -> State {
    let step = 1.0 / NODES_PER_UNIT;
    let n = ((x1 - x0).abs() / step).ceil().max(1.0) as usize;
    let h = (x1 - x0) / n as f64;
    let mut x = x0;
    for _ in 0..n {
        s = taylor(x, s, h);
        x += h;
    }
    s
}

struct Table {
    neg: Vec<State>,
    pos: Vec<State>,
}

fn series(x: f64) -> State {
    taylor(0.0, [AI0, AIP0, 1.0 / 3.0], x)
}

fn backward_start(x: f64) -> State {
    let r = x.sqrt();
    [1.0, -r - 0.25 / x, 1.0 / r]
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let step = 1.0 / NODES_PER_UNIT;
        let mut neg = Vec::with_capacity(NEG_TABLE_END + 1);
        let mut s = [AI0, AIP0, 1.0 / 3.0];
        neg.push(s);
        for j in 0..NEG_TABLE_END {
            s = taylor(-(j as f64) * step, s, -step);
            neg.push(s);
        }

        let mut pos = vec![[0.0; 3]; POS_TABLE_END + 1];
        let top = POS_TABLE_END as f64 * step;
        let mut s = march(BACKWARD_START, backward_start(BACKWARD_START), top);
        pos[POS_TABLE_END] = s;
        for j in (POS_TABLE_START..POS_TABLE_END).rev() {
            s = taylor((j + 1) as f64 * step, s, -step);
            pos[j] = s;
        }
        let anchor = series(POS_TABLE_START as f64 * step);
        let c = anchor[0] / pos[POS_TABLE_START][0];
        for v in pos.iter_mut().skip(POS_TABLE_START) {
            for e in v.iter_mut() {
                *e *= c;
            }
        }
        Table { neg, pos }
    })
}

/// (Ai(x), Ai′(x), ∫ₓ^∞Ai) without input validation.
pub(crate) fn airy_state(x: f64) -> State {
    let step = 1.0 / NODES_PER_UNIT;
    if x.abs() <= SERIES_RADIUS {
        return series(x);
    }
    let t = table();
    if x < 0.0 {
        let j = (-x * NODES_PER_UNIT).round() as usize;
        if j <= NEG_TABLE_END {
            let x0 = -(j as f64) * step;
            return taylor(x0, t.neg[j], x - x0);
        }
        return far_left(x);
    }
    let j = (x * NODES_PER_UNIT).round() as usize;
    if j <= POS_TABLE_END {
        let x0 = j as f64 * step;
        return taylor(x0, t.pos[j], x - x0);
    }
    far_right(x)
}

const POINCARE_U: [f64; 6] = [
    1.0,
    0.069_444_444_444_444_44,
    0.037_133_487_654_320_99,
    0.037_993_059_127_800_01,
    0.057_649_190_412_669_72,
    0.116_099_064_025_515_41,
];
const POINCARE_V: [f64; 6] = [
    1.0,
    -0.097_222_222_222_222_22,
    -0.043_885_030_864_197_53,
    -0.042_462_830_789_894_83,
    -0.062_662_163_492_032_30,
    -0.124_105_896_027_275_08,
];

/// Oscillatory expansions below the table, with z = −x, ζ = (2/3)z^{3/2}:
/// Ai(−z) ~ (cos(ζ − π/4)P_u + sin(ζ − π/4)Q_u)/(√π z^{1/4}),
/// Ai′(−z) ~ z^{1/4}(sin(ζ − π/4)P_v − cos(ζ − π/4)Q_v)/√π,
/// where P, Q are the even and odd parts of Σ(−1)^{⌊k/2⌋}(u|v)ₖζ^{−k}.
/// The tail follows from integrating by parts with Ai = Ai″/t:
/// ∫_{−∞}^x Ai t^{−k} = Ai′x^{−k−1} + (k+1)Ai x^{−k−2} + (k+1)(k+2)∫_{−∞}^x Ai t^{−k−3}.
fn far_left(x: f64) -> State {
    let z = -x;
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let (mut pu, mut qu, mut pv, mut qv) = (0.0, 0.0, 0.0, 0.0);
    let mut w = 1.0;
    for k in 0..6 {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            pu += sign * POINCARE_U[k] * w;
            pv += sign * POINCARE_V[k] * w;
        } else {
            qu += sign * POINCARE_U[k] * w;
            qv += sign * POINCARE_V[k] * w;
        }
        w /= zeta;
    }
    let phase = zeta - std::f64::consts::FRAC_PI_4;
    let (sn, cs) = phase.sin_cos();
    let rp = std::f64::consts::PI.sqrt();
    let a = (cs * pu + sn * qu) / (rp * z.powf(0.25));
    let ap = z.powf(0.25) * (sn * pv - cs * qv) / rp;
    let mut below = 0.0;
    let mut coef = 1.0;
    let mut k = 0;
    while k < 60 {
        let kf = k as f64;
        let term = coef * (ap * x.powi(-(k + 1)) + (kf + 1.0) * a * x.powi(-(k + 2)));
        below += term;
        if term.abs() < 1e-18 {
            break;
        }
        coef *= (kf + 1.0) * (kf + 2.0);
        k += 3;
    }
    [a, ap, 1.0 - below]
}

/// Poincaré expansions for x beyond the table (Ai < 1e-58 there):
/// Ai ~ e^{−ζ}/(2√π x^{1/4}) Σ(−1)ᵏuₖζ^{−k}, Ai′ ~ −x^{1/4}e^{−ζ}/(2√π) Σ(−1)ᵏvₖζ^{−k},
/// ζ = (2/3)x^{3/2}; the tail integral by Gauss–Legendre on the expansion.
fn far_right(x: f64) -> State {
    let pair = |x: f64| {
        let zeta = 2.0 / 3.0 * x.powf(1.5);
        let pre = (-zeta).exp() / (2.0 * std::f64::consts::PI.sqrt());
        let (mut su, mut sv, mut z) = (0.0, 0.0, 1.0);
        for k in 0..6 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            su += sign * POINCARE_U[k] * z;
            sv += sign * POINCARE_V[k] * z;
            z /= zeta;
        }
        (pre * su / x.powf(0.25), -pre * sv * x.powf(0.25))
    };
    let (a, ap) = pair(x);
    let width = 40.0 / x.sqrt();
    let tail = crate::quad::gauss_legendre(24).integrate(0.0, width, |v| pair(x + v).0);
    [a, ap, tail]
}

/// Ai(x) and Ai′(x). Absolute error below 1e-12 on [−50, 20].
pub fn airy(x: f64) -> Result<AiryValue> {
    check_finite(x, "airy argument")?;
    let s = airy_state(x);
    Ok(AiryValue {
        ai: s[0],
        ai_prime: s[1],
    })
}

/// ∫ₓ^∞ Ai(u) du. Tends to 0 as x → ∞ and to 1 as x → −∞.
pub fn airy_tail_integral(x: f64) -> Result<f64> {
    check_finite(x, "airy tail argument")?;
    Ok(airy_state(x)[2])
}

/// Ai(x) without validation; NaN propagates.
#[inline]
pub fn ai(x: f64) -> f64 {
    airy_state(x)[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_values() {
        let v = airy(0.0).unwrap();
        assert_eq!(v.ai, AI0);
        assert_eq!(v.ai_prime, AIP0);
        assert!((airy_tail_integral(0.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn branches_agree_at_the_switch() {
        for &x in &[-4.5, -4.4, -4.6, 4.4, 4.5, 4.6] {
            let j = (x * NODES_PER_UNIT).round();
            let x0 = j / NODES_PER_UNIT;
            let t = table();
            let tab = if x < 0.0 {
                taylor(x0, t.neg[(-j) as usize], x - x0)
            } else {
                taylor(x0, t.pos[j as usize], x - x0)
            };
            let ser = series(x);
            for k in 0..3 {
                assert!((tab[k] - ser[k]).abs() < 1e-12, "x={x} k={k} {tab:?} {ser:?}");
            }
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(airy(f64::NAN).is_err());
        assert!(airy_tail_integral(f64::INFINITY).is_err());
    }

    #[test]
    fn expansion_matches_table_end() {
        let x = POS_TABLE_END as f64 / NODES_PER_UNIT;
        let t = table().pos[POS_TABLE_END];
        let f = far_right(x);
        // The table's tail integral starts from an approximate value at x = 36,
        // so only its absolute size is meaningful there.
        for k in 0..2 {
            assert!((f[k] - t[k]).abs() < 1e-11 * t[k].abs(), "k={k} {f:?} {t:?}");
        }
        assert!((f[2] - t[2]).abs() < 1e-6 * t[2].abs());
    }

    #[test]
    fn left_expansion_matches_ode_march() {
        let step = 1.0 / NODES_PER_UNIT;
        let x0 = -(NEG_TABLE_END as f64) * step;
        let t = table();
        for &x in &[-100.0, -100.7, -130.0] {
            let ode = march(x0, t.neg[NEG_TABLE_END], x);
            let asy = far_left(x);
            for i in 0..3 {
                assert!((ode[i] - asy[i]).abs() < 1e-11, "x = {x}, component {i}: {} {}", ode[i], asy[i]);
            }
        }
    }

    #[test]
    fn far_arguments_are_finite() {
        assert!(ai(60.0) >= 0.0 && ai(60.0) < 1e-80);
        let v = airy(-150.0).unwrap();
        assert!(v.ai.abs() < 0.3 && v.ai_prime.abs() < 2.0);
        assert!((airy_tail_integral(-150.0).unwrap() - 1.0).abs() < 0.05);
    }
}
