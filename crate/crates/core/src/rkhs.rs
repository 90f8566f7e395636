//! Coefficient fields `C ∈ ℓ²(A_Λ)` and the RKHS they parametrise:
//! `g(x) = Σ d_ξ Tr[C(ξ) ξ(x) H(ξ)]` with `⟨g, h⟩ = Σ d_ξ Tr[C(ξ) B(ξ)*]`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::group::{enumerate_dual, GroupId, GroupPoint, IrrepIndex, IrrepLabel};
use crate::kernel::TruncatedKernel;
use crate::linalg::{self, CMatrix, ComplexSum, CompensatedSum};
use crate::quadrature::QuadratureGrid;
use crate::rng::{stream, StreamId};
use crate::{Error, Result};

/// A coefficient field supported on `A_Λ`, labels in dual order.
#[derive(Debug, Clone, PartialEq)]
pub struct RkhsCoefficients {
    group: GroupId,
    truncation: f64,
    labels: Vec<IrrepLabel>,
    matrices: Vec<CMatrix>,
    norm_sq: f64,
}

fn weighted_hs_norm_sq(labels: &[IrrepLabel], matrices: &[CMatrix]) -> f64 {
    labels
        .iter()
        .zip(matrices)
        .map(|(l, m)| l.dim as f64 * linalg::hs_norm_sq(m))
        .collect::<CompensatedSum>()
        .value()
}

impl RkhsCoefficients {
    pub fn from_matrices(group: GroupId, truncation: f64, matrices: Vec<CMatrix>) -> Result<Self> {
        let labels = enumerate_dual(group, truncation)?;
        if labels.len() != matrices.len() || labels.iter().zip(&matrices).any(|(l, m)| m.nrows() != l.dim || m.ncols() != l.dim) {
            return Err(Error::SupportMismatch);
        }
        let norm_sq = weighted_hs_norm_sq(&labels, &matrices);
        Ok(Self { group, truncation, labels, matrices, norm_sq })
    }

    pub fn from_fn<F: FnMut(&IrrepLabel) -> CMatrix>(group: GroupId, truncation: f64, f: F) -> Result<Self> {
        let labels = enumerate_dual(group, truncation)?;
        let matrices = labels.iter().map(f).collect();
        Self::from_matrices(group, truncation, matrices)
    }

    pub fn zeros(group: GroupId, truncation: f64) -> Result<Self> {
        Self::from_fn(group, truncation, |l| CMatrix::zeros(l.dim, l.dim))
    }

    /// Zero everywhere except `value` at `index`.
    pub fn single_mode(group: GroupId, truncation: f64, index: IrrepIndex, value: CMatrix) -> Result<Self> {
        let labels = enumerate_dual(group, truncation)?;
        if !labels.iter().any(|l| l.index == index) {
            return Err(Error::SupportMismatch);
        }
        Self::from_fn(group, truncation, |l| if l.index == index { value.clone() } else { CMatrix::zeros(l.dim, l.dim) })
    }

    /// Entries with independent standard complex Gaussian real and imaginary parts.
    pub fn random(group: GroupId, truncation: f64, seed: u64) -> Result<Self> {
        let mut rng = stream(seed, StreamId::Coefficients);
        Self::random_with(group, truncation, &mut rng)
    }

    pub fn random_with<R: Rng>(group: GroupId, truncation: f64, rng: &mut R) -> Result<Self> {
        Self::from_fn(group, truncation, |l| {
            CMatrix::from_fn(l.dim, l.dim, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        })
    }

    /// The field `C = H` of the kernel's square-root symbol.
    pub fn from_sqrt(kernel: &TruncatedKernel) -> Result<Self> {
        let h = kernel.sqrt()?;
        Self::from_matrices(h.group(), h.truncation(), h.matrices().to_vec())
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    pub fn labels(&self) -> &[IrrepLabel] {
        &self.labels
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn iter(&self) -> impl Iterator<Item = (&IrrepLabel, &CMatrix)> {
        self.labels.iter().zip(&self.matrices)
    }

    /// Cached `Σ d_ξ ‖C(ξ)‖²_HS`.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq)
    }

    /// Recomputes the norm without the cache.
    pub fn recompute_norm_sq(&self) -> f64 {
        weighted_hs_norm_sq(&self.labels, &self.matrices)
    }

    /// `a·self + b·other` on a common support.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        self.same_support(other)?;
        let matrices: Vec<CMatrix> = self.matrices.iter().zip(&other.matrices).map(|(x, y)| x * a + y * b).collect();
        Self::from_matrices(self.group, self.truncation, matrices)
    }

    /// The same field restricted to `A_λ` (zero elsewhere).
    pub fn project(&self, lambda: f64) -> Self {
        let matrices: Vec<CMatrix> = self
            .iter()
            .map(|(l, m)| if l.within(lambda) { m.clone() } else { CMatrix::zeros(l.dim, l.dim) })
            .collect();
        let norm_sq = weighted_hs_norm_sq(&self.labels, &matrices);
        Self { matrices, norm_sq, ..self.clone() }
    }

    fn same_support(&self, other: &Self) -> Result<()> {
        if self.group == other.group && self.truncation == other.truncation {
            Ok(())
        } else {
            Err(Error::SupportMismatch)
        }
    }

    fn matches_kernel(&self, kernel: &TruncatedKernel) -> Result<()> {
        if self.group == kernel.group() && self.truncation == kernel.truncation() {
            Ok(())
        } else {
            Err(Error::SupportMismatch)
        }
    }
}

/// `g(x) = Σ d_ξ Tr[C(ξ) ξ(x) H(ξ)]`.
pub fn rkhs_eval(c: &RkhsCoefficients, kernel: &TruncatedKernel, x: &GroupPoint) -> Result<Complex64> {
    c.matches_kernel(kernel)?;
    let h = kernel.sqrt()?;
    if x.group() != c.group {
        return Err(Error::PointMismatch(c.group));
    }
    let mut acc = ComplexSum::new();
    for ((l, cm), hm) in c.iter().zip(h.matrices()) {
        let hc = hm * cm;
        acc.add(linalg::trace_of_product(&hc, &l.evaluate(x)?) * l.dim as f64);
    }
    Ok(acc.value())
}

/// `⟨C, B⟩ = Σ d_ξ Tr[C(ξ) B(ξ)*]`; also the RKHS inner product of the
/// functions they parametrise.
pub fn rkhs_inner(c: &RkhsCoefficients, b: &RkhsCoefficients) -> Result<Complex64> {
    c.same_support(b)?;
    let mut acc = ComplexSum::new();
    for ((l, cm), bm) in c.iter().zip(&b.matrices) {
        acc.add(linalg::hs_inner(cm, bm) * l.dim as f64);
    }
    Ok(acc.value())
}

/// Coefficients of the kernel section `K_y = K(·, y)`: `C_y(ξ) = (ξ(y) H(ξ))*`.
pub fn kernel_section(kernel: &TruncatedKernel, y: &GroupPoint) -> Result<RkhsCoefficients> {
    let h = kernel.sqrt()?;
    let matrices = h
        .iter()
        .map(|(l, hm)| l.evaluate(y).map(|e| (e * hm).adjoint()))
        .collect::<Result<Vec<_>>>()?;
    RkhsCoefficients::from_matrices(kernel.group(), kernel.truncation(), matrices)
}

/// `|⟨g, K_y⟩ − g(y)|`.
pub fn reproducing_residual(c: &RkhsCoefficients, kernel: &TruncatedKernel, y: &GroupPoint) -> Result<f64> {
    let section = kernel_section(kernel, y)?;
    let lhs = rkhs_inner(c, &section)?;
    let rhs = rkhs_eval(c, kernel, y)?;
    Ok((lhs - rhs).norm())
}

/// Complex samples of a function on a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    points: Vec<GroupPoint>,
    values: Vec<Complex64>,
    sup_norm: f64,
}

impl SampledFunction {
    pub fn new(points: Vec<GroupPoint>, values: Vec<Complex64>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::InvalidParameter(format!("{} points but {} values", points.len(), values.len())));
        }
        let sup_norm = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Ok(Self { points, values, sup_norm })
    }

    pub fn points(&self) -> &[GroupPoint] {
        &self.points
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `max |value|`, exactly.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    /// Index of a point attaining the sup norm.
    pub fn argmax(&self) -> Option<usize> {
        (0..self.values.len()).max_by(|&i, &j| self.values[i].norm().total_cmp(&self.values[j].norm()))
    }
}

/// Samples of `Q C = 𝔉⁻¹[H C]` on the grid points.
pub fn q_apply(c: &RkhsCoefficients, kernel: &TruncatedKernel, grid: &QuadratureGrid) -> Result<SampledFunction> {
    c.matches_kernel(kernel)?;
    if grid.group() != c.group {
        return Err(Error::PointMismatch(c.group));
    }
    let h = kernel.sqrt()?;
    let hc: Vec<CMatrix> = c.matrices.iter().zip(h.matrices()).map(|(cm, hm)| hm * cm).collect();
    let mut values = Vec::with_capacity(grid.len());
    for p in grid.points() {
        let mut acc = ComplexSum::new();
        for (l, m) in c.labels.iter().zip(&hc) {
            acc.add(linalg::trace_of_product(m, &l.evaluate(p)?) * l.dim as f64);
        }
        values.push(acc.value());
    }
    SampledFunction::new(grid.points().to_vec(), values)
}

/// `‖Q‖`, `‖Q_{A_λ}‖`, `‖Q − Q_{A_λ}‖` from the weighted traces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorNorms {
    /// `(Σ_{A_Λ} d Tr σ)^{1/2}`
    pub q: f64,
    /// `(Σ_{A_λ} d Tr σ)^{1/2}`
    pub q_a: f64,
    /// `(Σ_{λ<⟨ξ⟩≤Λ} d Tr σ + tail)^{1/2}`
    pub q_acomp: f64,
    /// Analytic tail beyond `Λ` included in `q_acomp`.
    pub tail: f64,
}

pub fn operator_norms(kernel: &TruncatedKernel, lambda: f64) -> Result<OperatorNorms> {
    kernel.sqrt()?;
    let trunc = kernel.truncation();
    if !(lambda > 1.0) || lambda > trunc {
        return Err(Error::InvalidParameter(format!("λ = {lambda} outside (1, {trunc}]")));
    }
    let s = kernel.symbol();
    let total = s.weighted_trace_within(f64::INFINITY);
    let head = s.weighted_trace_within(lambda);
    let mid: f64 = s
        .iter()
        .filter(|(l, _)| !l.within(lambda))
        .map(|(l, m)| l.dim as f64 * linalg::trace(m).re)
        .collect::<CompensatedSum>()
        .value();
    let tail = crate::symbol::trace_norm(s)?.1.unwrap_or(0.0);
    Ok(OperatorNorms {
        q: libm::sqrt(total.max(0.0)),
        q_a: libm::sqrt(head.max(0.0)),
        q_acomp: libm::sqrt((mid + tail).max(0.0)),
        tail,
    })
}
