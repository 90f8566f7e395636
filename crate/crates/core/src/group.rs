//! The groups T¹, T², SU(2): unitary duals, points and representations.
//!
//! Laplace normalisation: `λ = |k|²` on the tori and `λ = ℓ(ℓ+1)` on SU(2)
//! (spin Casimir). The weight of a label is `⟨ξ⟩ = (1 + λ)^{1/2}`. Spins are
//! stored doubled (`m = 2ℓ`) so that every label is an exact integer.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::linalg::CMatrix;
use crate::wigner;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupId {
    Torus1,
    Torus2,
    Su2,
}

impl GroupId {
    /// Intrinsic (manifold) dimension `n`.
    pub fn dimension(self) -> usize {
        match self {
            GroupId::Torus1 => 1,
            GroupId::Torus2 => 2,
            GroupId::Su2 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GroupId::Torus1 => "torus1",
            GroupId::Torus2 => "torus2",
            GroupId::Su2 => "su2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "torus1" => Some(GroupId::Torus1),
            "torus2" => Some(GroupId::Torus2),
            "su2" => Some(GroupId::Su2),
            _ => None,
        }
    }

    pub fn identity(self) -> GroupPoint {
        match self {
            GroupId::Torus1 => GroupPoint::Circle(0.0),
            GroupId::Torus2 => GroupPoint::Torus([0.0, 0.0]),
            GroupId::Su2 => GroupPoint::Su2(Su2::identity()),
        }
    }
}

/// Which irreducible representation a label denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IrrepIndex {
    /// Character `x ↦ e^{ikx}` of T¹.
    Circle(i64),
    /// Character `x ↦ e^{i(k₁x₁ + k₂x₂)}` of T².
    Torus(i64, i64),
    /// Spin `m/2` representation of SU(2), stored as `m = 2ℓ`.
    Spin(u32),
}

impl IrrepIndex {
    pub fn group(self) -> GroupId {
        match self {
            IrrepIndex::Circle(_) => GroupId::Torus1,
            IrrepIndex::Torus(..) => GroupId::Torus2,
            IrrepIndex::Spin(_) => GroupId::Su2,
        }
    }

    pub fn label(self) -> IrrepLabel {
        IrrepLabel::new(self)
    }
}

/// One class `[ξ]` of the unitary dual with its dimension and Laplace eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrrepLabel {
    pub index: IrrepIndex,
    pub dim: usize,
    pub eigenvalue: f64,
}

impl IrrepLabel {
    pub fn new(index: IrrepIndex) -> Self {
        let (dim, eigenvalue) = match index {
            IrrepIndex::Circle(k) => (1, (k * k) as f64),
            IrrepIndex::Torus(k1, k2) => (1, (k1 * k1 + k2 * k2) as f64),
            // ℓ(ℓ+1) = m(m+2)/4, exact in binary floating point
            IrrepIndex::Spin(m) => (m as usize + 1, (m as f64) * (m as f64 + 2.0) / 4.0),
        };
        Self { index, dim, eigenvalue }
    }

    pub fn group(&self) -> GroupId {
        self.index.group()
    }

    /// `⟨ξ⟩² = 1 + λ`, exact.
    pub fn weight_sq(&self) -> f64 {
        1.0 + self.eigenvalue
    }

    /// `⟨ξ⟩ = (1 + λ)^{1/2}`.
    pub fn weight(&self) -> f64 {
        libm::sqrt(self.weight_sq())
    }

    /// Does the label lie in `A_λ = {⟨ξ⟩ ≤ λ}`?
    pub fn within(&self, lambda: f64) -> bool {
        self.weight_sq() <= lambda * lambda
    }

    /// Evaluate `ξ(x)`, a `d_ξ × d_ξ` unitary matrix.
    pub fn evaluate(&self, x: &GroupPoint) -> Result<CMatrix> {
        match (self.index, x) {
            (IrrepIndex::Circle(k), GroupPoint::Circle(t)) => Ok(scalar(Complex64::from_polar(1.0, k as f64 * t))),
            (IrrepIndex::Torus(k1, k2), GroupPoint::Torus([t1, t2])) => {
                Ok(scalar(Complex64::from_polar(1.0, k1 as f64 * t1 + k2 as f64 * t2)))
            }
            (IrrepIndex::Spin(m), GroupPoint::Su2(u)) => Ok(wigner::wigner_d(m, u.a, u.b)),
            _ => Err(Error::PointMismatch(self.group())),
        }
    }

    /// Character `Tr ξ(x)`.
    pub fn character(&self, x: &GroupPoint) -> Result<Complex64> {
        match (self.index, x) {
            (IrrepIndex::Spin(m), GroupPoint::Su2(u)) => Ok(Complex64::new(wigner::character(m, u.a), 0.0)),
            _ => self.evaluate(x).map(|m| crate::linalg::trace(&m)),
        }
    }
}

fn scalar(z: Complex64) -> CMatrix {
    CMatrix::from_element(1, 1, z)
}

/// Sort key: weight first, then index.
pub(crate) fn label_order(a: &IrrepLabel, b: &IrrepLabel) -> Ordering {
    a.weight_sq().total_cmp(&b.weight_sq()).then_with(|| a.index.cmp(&b.index))
}

/// `A_λ` for the given group, sorted by `⟨ξ⟩` then index.
pub fn enumerate_dual(group: GroupId, lambda_max: f64) -> Result<Vec<IrrepLabel>> {
    if !(lambda_max > 1.0) || !lambda_max.is_finite() {
        return Err(Error::ThresholdTooSmall(lambda_max));
    }
    let bound = lambda_max * lambda_max;
    let mut out = Vec::new();
    match group {
        GroupId::Torus1 => {
            let kmax = libm::floor(libm::sqrt(bound)) as i64 + 1;
            for k in -kmax..=kmax {
                let l = IrrepLabel::new(IrrepIndex::Circle(k));
                if l.weight_sq() <= bound {
                    out.push(l);
                }
            }
        }
        GroupId::Torus2 => {
            let kmax = libm::floor(libm::sqrt(bound)) as i64 + 1;
            for k1 in -kmax..=kmax {
                for k2 in -kmax..=kmax {
                    let l = IrrepLabel::new(IrrepIndex::Torus(k1, k2));
                    if l.weight_sq() <= bound {
                        out.push(l);
                    }
                }
            }
        }
        GroupId::Su2 => {
            let mut m = 0u32;
            loop {
                let l = IrrepLabel::new(IrrepIndex::Spin(m));
                if l.weight_sq() > bound {
                    break;
                }
                out.push(l);
                m += 1;
            }
        }
    }
    out.sort_by(label_order);
    Ok(out)
}

/// Evaluate `ξ(x)` after checking that label and point both belong to `group`.
pub fn evaluate_irrep(group: GroupId, label: &IrrepLabel, x: &GroupPoint) -> Result<CMatrix> {
    if label.group() != group {
        return Err(Error::LabelMismatch(group));
    }
    if x.group() != group {
        return Err(Error::PointMismatch(group));
    }
    label.evaluate(x)
}

/// SU(2) element `U = [[a, −b̄], [b, ā]]` with `|a|² + |b|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2 {
    pub a: Complex64,
    pub b: Complex64,
}

impl Su2 {
    pub fn identity() -> Self {
        Self { a: Complex64::new(1.0, 0.0), b: Complex64::new(0.0, 0.0) }
    }

    /// Rescales `(a, b)` onto the unit 3-sphere.
    pub fn new(a: Complex64, b: Complex64) -> Self {
        let n = libm::sqrt(a.norm_sqr() + b.norm_sqr());
        Self { a: a / n, b: b / n }
    }

    /// z-y-z Euler angles, `α ∈ [0, 2π)`, `β ∈ [0, π]`, `γ ∈ [0, 4π)`.
    pub fn from_euler(alpha: f64, beta: f64, gamma: f64) -> Self {
        let a = Complex64::from_polar(libm::cos(beta / 2.0), -(alpha + gamma) / 2.0);
        let b = Complex64::from_polar(libm::sin(beta / 2.0), (alpha - gamma) / 2.0);
        Self { a, b }
    }

    /// Inverse of [`Su2::from_euler`] (choosing `α = 0` at the poles).
    pub fn to_euler(&self) -> (f64, f64, f64) {
        let beta = 2.0 * libm::atan2(self.b.norm(), self.a.norm());
        let sum = if self.a.norm() > 1e-300 { -2.0 * self.a.arg() } else { 0.0 };
        let diff = if self.b.norm() > 1e-300 { 2.0 * self.b.arg() } else { 0.0 };
        let (alpha, gamma) = if self.b.norm() <= 1e-300 {
            (0.0, sum)
        } else if self.a.norm() <= 1e-300 {
            (0.0, -diff)
        } else {
            ((sum + diff) / 2.0, (sum - diff) / 2.0)
        };
        // shifting α by 2πk must shift γ by −2πk to stay on the same element
        let k = libm::floor(alpha / TAU);
        (alpha - k * TAU, beta, wrap(gamma + k * TAU, 2.0 * TAU))
    }

    /// The 2×2 defining matrix.
    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[self.a, -self.b.conj(), self.b, self.a.conj()])
    }

    pub fn mul(&self, other: &Su2) -> Su2 {
        Su2 {
            a: self.a * other.a - self.b.conj() * other.b,
            b: self.b * other.a + self.a.conj() * other.b,
        }
    }

    pub fn inverse(&self) -> Su2 {
        Su2 { a: self.a.conj(), b: -self.b }
    }

    /// Rotation angle `θ ∈ [0, 2π]` with eigenvalues `e^{±iθ/2}`.
    pub fn rotation_angle(&self) -> f64 {
        2.0 * libm::acos(self.a.re.clamp(-1.0, 1.0))
    }
}

fn wrap(x: f64, period: f64) -> f64 {
    let r = libm::fmod(x, period);
    let r = if r < 0.0 { r + period } else { r };
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Signed representative of an angle difference in `[−π, π]`.
fn wrap_signed(x: f64) -> f64 {
    let r = wrap(x + PI, TAU);
    r - PI
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupPoint {
    Circle(f64),
    Torus([f64; 2]),
    Su2(Su2),
}

impl GroupPoint {
    pub fn group(&self) -> GroupId {
        match self {
            GroupPoint::Circle(_) => GroupId::Torus1,
            GroupPoint::Torus(_) => GroupId::Torus2,
            GroupPoint::Su2(_) => GroupId::Su2,
        }
    }

    pub fn mul(&self, other: &GroupPoint) -> Result<GroupPoint> {
        match (self, other) {
            (GroupPoint::Circle(x), GroupPoint::Circle(y)) => Ok(GroupPoint::Circle(wrap(x + y, TAU))),
            (GroupPoint::Torus(x), GroupPoint::Torus(y)) => {
                Ok(GroupPoint::Torus([wrap(x[0] + y[0], TAU), wrap(x[1] + y[1], TAU)]))
            }
            (GroupPoint::Su2(x), GroupPoint::Su2(y)) => Ok(GroupPoint::Su2(x.mul(y))),
            _ => Err(Error::PointMismatch(self.group())),
        }
    }

    pub fn inverse(&self) -> GroupPoint {
        match self {
            GroupPoint::Circle(x) => GroupPoint::Circle(wrap(-x, TAU)),
            GroupPoint::Torus(x) => GroupPoint::Torus([wrap(-x[0], TAU), wrap(-x[1], TAU)]),
            GroupPoint::Su2(u) => GroupPoint::Su2(u.inverse()),
        }
    }

    /// Bi-invariant distance with `‖ξ(x) − ξ(y)‖_op ≤ ⟨ξ⟩ · dist(x, y)` for
    /// every label: flat wrapped distance on the tori, rotation angle of
    /// `x⁻¹y` on SU(2).
    pub fn distance(&self, other: &GroupPoint) -> Result<f64> {
        match (self, other) {
            (GroupPoint::Circle(x), GroupPoint::Circle(y)) => Ok(wrap_signed(x - y).abs()),
            (GroupPoint::Torus(x), GroupPoint::Torus(y)) => {
                let d0 = wrap_signed(x[0] - y[0]);
                let d1 = wrap_signed(x[1] - y[1]);
                Ok(libm::sqrt(d0 * d0 + d1 * d1))
            }
            (GroupPoint::Su2(x), GroupPoint::Su2(y)) => Ok(x.inverse().mul(y).rotation_angle()),
            _ => Err(Error::PointMismatch(self.group())),
        }
    }

    /// Coordinates used for tabular export: angles on tori, Euler angles on SU(2).
    pub fn coordinates(&self) -> Vec<f64> {
        match self {
            GroupPoint::Circle(x) => alloc::vec![*x],
            GroupPoint::Torus(x) => alloc::vec![x[0], x[1]],
            GroupPoint::Su2(u) => {
                let (a, b, g) = u.to_euler();
                alloc::vec![a, b, g]
            }
        }
    }
}
