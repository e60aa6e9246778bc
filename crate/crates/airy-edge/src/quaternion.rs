//! Quaternions with complex coefficients, represented by 2×2 complex
//! matrices, and the quaternion determinant of self-dual matrices.
//!
//! q = q₀𝟏 + q₁e₁ + q₂e₂ + q₃e₃ corresponds to
//! [[q₀ + iq₁, q₂ + iq₃], [−q₂ + iq₃, q₀ − iq₁]].

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Largest order accepted by [`qdet`].
pub const QDET_MAX_ORDER: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub q: [C64; 4],
}

impl Quaternion {
    pub const fn new(q0: C64, q1: C64, q2: C64, q3: C64) -> Self {
        Self { q: [q0, q1, q2, q3] }
    }

    pub fn real(q0: f64, q1: f64, q2: f64, q3: f64) -> Self {
        Self::new(C64::from(q0), C64::from(q1), C64::from(q2), C64::from(q3))
    }

    pub fn scalar(r: f64) -> Self {
        Self::real(r, 0.0, 0.0, 0.0)
    }

    pub fn zero() -> Self {
        Self::scalar(0.0)
    }

    pub fn one() -> Self {
        Self::scalar(1.0)
    }

    pub fn e1() -> Self {
        Self::real(0.0, 1.0, 0.0, 0.0)
    }

    pub fn e2() -> Self {
        Self::real(0.0, 0.0, 1.0, 0.0)
    }

    pub fn e3() -> Self {
        Self::real(0.0, 0.0, 0.0, 1.0)
    }

    /// Quaternion of the matrix [[a, b], [c, d]].
    pub fn from_matrix(m: [[C64; 2]; 2]) -> Self {
        let [[a, b], [c, d]] = m;
        Self::new(
            (a + d) * 0.5,
            -I * (a - d) * 0.5,
            (b - c) * 0.5,
            -I * (b + c) * 0.5,
        )
    }

    /// Quaternion of a real 2×2 block.
    pub fn from_real_block(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::from_matrix([[a.into(), b.into()], [c.into(), d.into()]])
    }

    pub fn to_matrix(&self) -> [[C64; 2]; 2] {
        let [q0, q1, q2, q3] = self.q;
        [[q0 + I * q1, q2 + I * q3], [-q2 + I * q3, q0 - I * q1]]
    }

    /// Dual q̄ = q₀ − q₁e₁ − q₂e₂ − q₃e₃ (the adjugate matrix).
    pub fn conjugate(&self) -> Self {
        let [q0, q1, q2, q3] = self.q;
        Self::new(q0, -q1, -q2, -q3)
    }

    /// Complex scalar part [q]⁽⁰⁾ = q₀.
    pub fn scalar_part(&self) -> C64 {
        self.q[0]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.q[0] * s, self.q[1] * s, self.q[2] * s, self.q[3] * s)
    }

    /// Largest coefficient modulus.
    pub fn norm_max(&self) -> f64 {
        self.q.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, o: Quaternion) -> Quaternion {
        // e₁² = e₂² = e₃² = −1, e₁e₂ = e₃, e₂e₃ = e₁, e₃e₁ = e₂.
        let [a0, a1, a2, a3] = self.q;
        let [b0, b1, b2, b3] = o.q;
        Quaternion::new(
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;

    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.q[0] + o.q[0], self.q[1] + o.q[1], self.q[2] + o.q[2], self.q[3] + o.q[3])
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;

    fn sub(self, o: Quaternion) -> Quaternion {
        self + (-o)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

/// Product of two quaternions.
pub fn multiply(a: Quaternion, b: Quaternion) -> Quaternion {
    a * b
}

/// Scalar part [q]⁽⁰⁾.
pub fn scalar_part(q: Quaternion) -> C64 {
    q.scalar_part()
}

/// A k×k quaternion matrix with aᵢⱼ = conj(aⱼᵢ).
#[derive(Debug, Clone, PartialEq)]
pub struct SelfDualMatrix {
    order: usize,
    entries: Vec<Quaternion>,
}

impl SelfDualMatrix {
    /// Validates self-duality to 1e-12 (relative to the largest entry).
    pub fn new(order: usize, entries: Vec<Quaternion>) -> Result<Self> {
        if entries.len() != order * order {
            return Err(Error::Precondition(format!(
                "expected {} entries for order {order}, got {}",
                order * order,
                entries.len()
            )));
        }
        let scale = entries.iter().map(|q| q.norm_max()).fold(1.0, f64::max);
        for i in 0..order {
            for j in i..order {
                let d = entries[i * order + j] - entries[j * order + i].conjugate();
                if d.norm_max() > 1e-12 * scale {
                    return Err(Error::Precondition(format!(
                        "matrix is not self-dual at ({i}, {j}): defect {:e}",
                        d.norm_max()
                    )));
                }
            }
        }
        Ok(Self { order, entries })
    }

    /// Symmetrises aᵢⱼ and conj(aⱼᵢ) by averaging, then builds the matrix.
    pub fn self_dualized(order: usize, mut entries: Vec<Quaternion>) -> Result<Self> {
        if entries.len() != order * order {
            return Err(Error::Precondition("entry count does not match order".into()));
        }
        for i in 0..order {
            for j in i..order {
                let avg = (entries[i * order + j] + entries[j * order + i].conjugate()).scale(0.5);
                entries[i * order + j] = avg;
                entries[j * order + i] = avg.conjugate();
            }
        }
        Ok(Self { order, entries })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> Quaternion {
        self.entries[i * self.order + j]
    }

    /// The 2k×2k complex matrix obtained by substituting each entry's 2×2 block.
    pub fn complex_representation(&self) -> DMatrix<C64> {
        let k = self.order;
        let mut m = DMatrix::<C64>::zeros(2 * k, 2 * k);
        for i in 0..k {
            for j in 0..k {
                let b = self.get(i, j).to_matrix();
                for r in 0..2 {
                    for c in 0..2 {
                        m[(2 * i + r, 2 * j + c)] = b[r][c];
                    }
                }
            }
        }
        m
    }

    /// Simultaneous row/column permutation.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let k = self.order;
        let mut e = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                e.push(self.get(perm[i], perm[j]));
            }
        }
        Self { order: k, entries: e }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Quaternion determinant: Σ_σ sign(σ) ∏_cycles [a_{c₁c₂} a_{c₂c₃} ⋯ a_{c_ℓc₁}]⁽⁰⁾.
///
/// Permutations are visited in lexicographic order and each cycle starts
/// at its smallest index, so the floating-point summation order is fixed.
pub fn qdet(m: &SelfDualMatrix) -> Result<C64> {
    let k = m.order;
    if k > QDET_MAX_ORDER {
        return Err(Error::Capability(format!(
            "qdet order {k} exceeds the cap {QDET_MAX_ORDER}"
        )));
    }
    if k == 0 {
        return Ok(C64::from(1.0));
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut seen = vec![false; k];
    let mut total = C64::from(0.0);
    loop {
        seen.iter_mut().for_each(|s| *s = false);
        let mut term = C64::from(1.0);
        let mut cycles = 0;
        for start in 0..k {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut prod = Quaternion::one();
            let mut c = start;
            loop {
                seen[c] = true;
                let next = perm[c];
                prod = prod * m.get(c, next);
                c = next;
                if c == start {
                    break;
                }
            }
            term *= prod.scalar_part();
        }
        if (k - cycles) % 2 == 1 {
            term = -term;
        }
        total += term;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_products() {
        assert_eq!(Quaternion::one() * Quaternion::e1(), Quaternion::e1());
        assert_eq!(Quaternion::e1() * Quaternion::e2(), Quaternion::e3());
        assert_eq!(Quaternion::e1() * Quaternion::e1(), -Quaternion::one());
        assert_eq!(Quaternion::e2() * Quaternion::e3(), Quaternion::e1());
        assert_eq!(Quaternion::e3() * Quaternion::e1(), Quaternion::e2());
    }

    #[test]
    fn scalar_parts() {
        assert_eq!(Quaternion::e1().scalar_part(), C64::from(0.0));
        assert_eq!(Quaternion::scalar(2.5).scalar_part(), C64::from(2.5));
        let q = Quaternion::from_real_block(1.0, 2.0, 3.0, 7.0);
        assert_eq!(q.scalar_part(), C64::from(4.0));
    }

    #[test]
    fn permutations_are_lexicographic() {
        let mut p = vec![0, 1, 2];
        let mut all = vec![p.clone()];
        while next_permutation(&mut p) {
            all.push(p.clone());
        }
        assert_eq!(all.len(), 6);
        assert_eq!(all[1], vec![0, 2, 1]);
        assert_eq!(all[5], vec![2, 1, 0]);
    }

    #[test]
    fn cap_and_validation() {
        let big = SelfDualMatrix::new(10, vec![Quaternion::one(); 100]).unwrap();
        assert!(matches!(qdet(&big), Err(Error::Capability(_))));
        let bad = vec![Quaternion::one(), Quaternion::e1(), Quaternion::e1(), Quaternion::one()];
        assert!(SelfDualMatrix::new(2, bad).is_err());
    }
}
