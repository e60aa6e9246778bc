//! Correlation kernels of the soft-edge point fields.
//!
//! β = 2 kernels are scalar; β = 1 and β = 4 kernels are quaternions. A
//! [`KernelHandle`] selects β, the regime (finite n or edge limit) and an
//! optional Palm anchor, and resolves to an evaluatable [`Kernel`].

mod blocks;
mod divided;
mod extended;
mod palm;
mod scalar;
mod table;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::quaternion::{qdet, Quaternion, SelfDualMatrix, QDET_MAX_ORDER};
use crate::specfun::DEFAULT_N_MAX;

use blocks::{JKernel, Symmetry};
pub(crate) use scalar::HermiteKernel;
use scalar::{AiryKernel, ScalarKernel};

pub use palm::PalmProfile;
pub use table::{KernelColumns, PanelGrid};
pub use extended::{extended_airy_kernel, fredholm_gap, fredholm_gap_for, DEFAULT_GAP_ORDER};

/// Smallest one-point density accepted at a Palm anchor.
pub const PALM_DENSITY_FLOOR: f64 = 1e-12;

/// Negative correlation values down to this size are clipped to 0.
pub const CLIP_TOLERANCE: f64 = 1e-9;

/// Inverse temperature of the ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Beta {
    One,
    Two,
    Four,
}

impl Beta {
    pub fn value(self) -> f64 {
        match self {
            Beta::One => 1.0,
            Beta::Two => 2.0,
            Beta::Four => 4.0,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Beta::One => 1,
            Beta::Two => 2,
            Beta::Four => 4,
        }
    }
}

impl TryFrom<u8> for Beta {
    type Error = Error;

    fn try_from(b: u8) -> Result<Self> {
        match b {
            1 => Ok(Beta::One),
            2 => Ok(Beta::Two),
            4 => Ok(Beta::Four),
            _ => Err(Error::Domain(format!("β must be 1, 2 or 4, got {b}"))),
        }
    }
}

impl From<Beta> for u8 {
    fn from(b: Beta) -> u8 {
        b.as_u8()
    }
}

impl std::fmt::Display for Beta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Finite n-particle field or the edge limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Finite(usize),
    Limit,
}

/// Kernel selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelHandle {
    pub beta: Beta,
    pub regime: Regime,
    pub palm_anchor: Option<f64>,
}

impl KernelHandle {
    pub fn new(beta: Beta, regime: Regime) -> Self {
        Self { beta, regime, palm_anchor: None }
    }

    pub fn limit(beta: Beta) -> Self {
        Self::new(beta, Regime::Limit)
    }

    pub fn finite(beta: Beta, n: usize) -> Self {
        Self::new(beta, Regime::Finite(n))
    }

    pub fn with_anchor(mut self, x: f64) -> Self {
        self.palm_anchor = Some(x);
        self
    }

    pub fn without_anchor(mut self) -> Self {
        self.palm_anchor = None;
        self
    }

    /// Builds the kernel, validating n and the anchor density.
    pub fn resolve(&self) -> Result<Kernel> {
        let base = match (self.beta, self.regime) {
            (_, Regime::Finite(0)) => {
                return Err(Error::Domain("finite regime requires n ≥ 1".into()))
            }
            (_, Regime::Finite(n)) if n > DEFAULT_N_MAX => {
                return Err(Error::Capability(format!(
                    "n = {n} exceeds N_max = {DEFAULT_N_MAX}"
                )))
            }
            (Beta::One, Regime::Finite(1)) => {
                return Err(Error::Domain("β = 1 finite kernels require n ≥ 2".into()))
            }
            (Beta::Two, Regime::Limit) => Base::Scalar(Box::new(AiryKernel)),
            (Beta::Two, Regime::Finite(n)) => Base::Scalar(Box::new(HermiteKernel::diagonal(n))),
            (Beta::One, Regime::Limit) => Base::Quaternion(JKernel::limit(Symmetry::Orthogonal)),
            (Beta::Four, Regime::Limit) => Base::Quaternion(JKernel::limit(Symmetry::Symplectic)),
            (Beta::One, Regime::Finite(n)) => {
                Base::Quaternion(JKernel::finite(Symmetry::Orthogonal, n)?)
            }
            (Beta::Four, Regime::Finite(n)) => {
                Base::Quaternion(JKernel::finite(Symmetry::Symplectic, n)?)
            }
        };
        let mut k = Kernel { handle: *self, base, anchor: None };
        if let Some(x) = self.palm_anchor {
            check_finite(x, "Palm anchor")?;
            let d = k.base_density(x);
            if !(d > PALM_DENSITY_FLOOR) {
                return Err(Error::SingularAnchor { x, density: d });
            }
            k.anchor = Some((x, d));
        }
        Ok(k)
    }
}

/// A kernel value: scalar for β = 2, quaternion otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelValue {
    Scalar(f64),
    Quaternion(Quaternion),
}

impl KernelValue {
    /// The value as a quaternion (scalars embed as r·𝟏).
    pub fn to_quaternion(self) -> Quaternion {
        match self {
            KernelValue::Scalar(r) => Quaternion::scalar(r),
            KernelValue::Quaternion(q) => q,
        }
    }

    /// Real scalar part.
    pub fn scalar_part(self) -> f64 {
        match self {
            KernelValue::Scalar(r) => r,
            KernelValue::Quaternion(q) => q.scalar_part().re,
        }
    }
}

enum Base {
    Scalar(Box<dyn ScalarKernel>),
    Quaternion(JKernel),
}

/// A resolved kernel with its cached ingredients.
pub struct Kernel {
    handle: KernelHandle,
    base: Base,
    /// Anchor and its one-point density.
    anchor: Option<(f64, f64)>,
}

impl std::fmt::Debug for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Kernel").field("handle", &self.handle).finish()
    }
}

impl Kernel {
    pub fn handle(&self) -> KernelHandle {
        self.handle
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self.base, Base::Scalar(_))
    }

    fn base_value(&self, x: f64, y: f64) -> KernelValue {
        match &self.base {
            Base::Scalar(k) => KernelValue::Scalar(k.value(x, y)),
            Base::Quaternion(j) => KernelValue::Quaternion(j.quaternion(x, y)),
        }
    }

    fn base_density(&self, x: f64) -> f64 {
        match &self.base {
            Base::Scalar(k) => k.value(x, x),
            Base::Quaternion(j) => j.density(x),
        }
    }

    /// [K(y, x) K(x, y)]⁽⁰⁾ of the kernel without Palm reduction.
    fn base_l_product(&self, x: f64, y: f64) -> f64 {
        match &self.base {
            Base::Scalar(k) => {
                let v = k.value(x, y);
                v * v
            }
            Base::Quaternion(j) => j.l_product(x, y),
        }
    }

    /// K(x, y), Palm-reduced when the handle carries an anchor.
    pub fn value(&self, x: f64, y: f64) -> KernelValue {
        let base = self.base_value(x, y);
        let Some((a, rho)) = self.anchor else {
            return base;
        };
        match base {
            KernelValue::Scalar(v) => {
                let (ka, kb) = match &self.base {
                    Base::Scalar(k) => (k.value(x, a), k.value(a, y)),
                    Base::Quaternion(_) => unreachable!(),
                };
                KernelValue::Scalar(v - ka * kb / rho)
            }
            KernelValue::Quaternion(q) => {
                let prod = self.base_value(x, a).to_quaternion() * self.base_value(a, y).to_quaternion();
                KernelValue::Quaternion(q - prod.scale(1.0 / rho))
            }
        }
    }

    /// One-point density ρ¹(x) (of the Palm field when anchored).
    pub fn density(&self, x: f64) -> f64 {
        let d = self.base_density(x);
        match self.anchor {
            None => d,
            Some((a, rho)) => d - self.base_l_product(a, x) / rho,
        }
    }

    /// [K(y, x) K(x, y)]⁽⁰⁾; for β = 1, 4 evaluated through the J-form.
    /// Palm anchors are ignored.
    pub fn l_product(&self, x: f64, y: f64) -> f64 {
        self.base_l_product(x, y)
    }

    /// The same product through quaternion multiplication (imaginary residue kept).
    pub fn l_product_quaternion(&self, x: f64, y: f64) -> nalgebra::Complex<f64> {
        let a = self.base_value(y, x).to_quaternion();
        let b = self.base_value(x, y).to_quaternion();
        (a * b).scalar_part()
    }

    /// Anchor and ρ¹ at the anchor, if any.
    pub fn anchor(&self) -> Option<(f64, f64)> {
        self.anchor
    }

    /// ∂K/∂y for scalar kernels (None for quaternion kernels).
    pub fn dy(&self, x: f64, y: f64) -> Option<f64> {
        match &self.base {
            Base::Scalar(k) if self.anchor.is_none() => Some(k.dy(x, y)),
            _ => None,
        }
    }

    /// k-point correlation function at distinct points.
    pub fn correlation(&self, points: &[f64]) -> Result<f64> {
        let k = points.len();
        if k == 0 {
            return Ok(1.0);
        }
        for (i, &p) in points.iter().enumerate() {
            check_finite(p, "correlation point")?;
            if points[..i].contains(&p) {
                return Err(Error::Precondition("correlation points must be distinct".into()));
            }
        }
        let value = match &self.base {
            Base::Scalar(_) => {
                let m = DMatrix::from_fn(k, k, |i, j| {
                    if i == j {
                        self.density(points[i])
                    } else {
                        self.value(points[i], points[j]).scalar_part()
                    }
                });
                m.determinant()
            }
            Base::Quaternion(_) => {
                if k > QDET_MAX_ORDER {
                    return Err(Error::Capability(format!(
                        "quaternion correlation of order {k} exceeds the cap {QDET_MAX_ORDER}"
                    )));
                }
                let mut entries = Vec::with_capacity(k * k);
                for &a in points {
                    for &b in points {
                        entries.push(self.value(a, b).to_quaternion());
                    }
                }
                let m = SelfDualMatrix::self_dualized(k, entries)?;
                let d = qdet(&m)?;
                let scale = d.re.abs().max(1.0);
                if d.im.abs() > 1e-9 * scale {
                    return Err(Error::Accuracy(format!(
                        "quaternion determinant has imaginary residue {:e}",
                        d.im
                    )));
                }
                d.re
            }
        };
        clip(value)
    }
}

fn clip(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -CLIP_TOLERANCE {
        Ok(0.0)
    } else {
        Err(Error::Accuracy(format!("negative correlation value {v:e}")))
    }
}

/// Correlation request: a kernel handle and k distinct soft-edge points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRequest {
    pub handle: KernelHandle,
    pub points: Vec<f64>,
}

/// ρᵏ at the requested points: det for β = 2, qdet for β = 1, 4.
pub fn correlation(req: &CorrelationRequest) -> Result<f64> {
    if req.handle.beta != Beta::Two && req.points.len() > QDET_MAX_ORDER {
        return Err(Error::Capability(format!(
            "quaternion correlation of order {} exceeds the cap {QDET_MAX_ORDER}",
            req.points.len()
        )));
    }
    req.handle.resolve()?.correlation(&req.points)
}

/// K_Ai,2(x, y) = [Ai(x)Ai′(y) − Ai′(x)Ai(y)]/(x − y), diagonal Ai′(x)² − x Ai(x)².
pub fn k_airy2(x: f64, y: f64) -> f64 {
    AiryKernel.value(x, y)
}

/// ∂K_Ai,2/∂y.
pub fn k_airy2_dy(x: f64, y: f64) -> f64 {
    AiryKernel.dy(x, y)
}

/// Limit quaternion kernel K_Ai,β for β ∈ {1, 4}.
pub fn k_airy_quaternion(beta: Beta, x: f64, y: f64) -> Result<Quaternion> {
    check_finite(x, "x")?;
    check_finite(y, "y")?;
    match beta {
        Beta::One => Ok(JKernel::limit(Symmetry::Orthogonal).quaternion(x, y)),
        Beta::Four => Ok(JKernel::limit(Symmetry::Symplectic).quaternion(x, y)),
        Beta::Two => Err(Error::Domain("β = 2 kernels are scalar; use k_airy2".into())),
    }
}

/// Finite-n β = 2 kernel Kⁿ(x, y) in soft-edge coordinates.
pub fn k_airy2_finite(n: usize, x: f64, y: f64) -> Result<f64> {
    check_n(n)?;
    check_finite(x, "x")?;
    check_finite(y, "y")?;
    Ok(HermiteKernel::diagonal(n).value(x, y))
}

/// Sum form n^{−1/3} Σ_{m=0}^{n−1} ψₘⁿ(x)ψₘⁿ(y) of the finite-n kernel.
pub fn k_airy2_finite_sum(n: usize, x: f64, y: f64) -> Result<f64> {
    check_n(n)?;
    Ok(HermiteKernel::diagonal(n).sum_form(x, y))
}

/// Christoffel–Darboux ratio form of the finite-n kernel (x ≠ y).
pub fn k_airy2_finite_ratio(n: usize, x: f64, y: f64) -> Result<f64> {
    check_n(n)?;
    if x == y {
        return Err(Error::Singularity("ratio form is undefined on the diagonal".into()));
    }
    Ok(HermiteKernel::diagonal(n).ratio_form(x, y))
}

/// Finite-n quaternion kernel for β ∈ {1, 4}.
///
/// Builds the ε-transform tables on each call; resolve a [`KernelHandle`]
/// for repeated evaluation.
pub fn k_quaternion_finite(beta: Beta, n: usize, x: f64, y: f64) -> Result<Quaternion> {
    if beta == Beta::Two {
        return Err(Error::Domain("β = 2 kernels are scalar; use k_airy2_finite".into()));
    }
    match KernelHandle::finite(beta, n).resolve()?.value(x, y) {
        KernelValue::Quaternion(q) => Ok(q),
        KernelValue::Scalar(_) => unreachable!(),
    }
}

/// Palm kernel K_x(y, z) = K(y, z) − K(y, x) K(x, z)/ρ¹(x).
pub fn palm_kernel(handle: &KernelHandle, y: f64, z: f64) -> Result<KernelValue> {
    if handle.palm_anchor.is_none() {
        return Err(Error::Precondition("palm_kernel requires a handle with an anchor".into()));
    }
    Ok(handle.resolve()?.value(y, z))
}

/// Lⁿ_β(x, y) = [Kⁿ_β(y, x) Kⁿ_β(x, y)]⁽⁰⁾.
pub fn l_product(beta: Beta, n: usize, x: f64, y: f64) -> Result<f64> {
    Ok(KernelHandle::finite(beta, n).resolve()?.l_product(x, y))
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("n must be ≥ 1".into()));
    }
    if n > DEFAULT_N_MAX {
        return Err(Error::Capability(format!("n = {n} exceeds N_max = {DEFAULT_N_MAX}")));
    }
    Ok(())
}
