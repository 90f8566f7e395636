//! Matrix symbols `σ(ξ)`: construction, certification, square roots and
//! decay-order fits.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::counting::{tail_sum_bound, Decay};
use crate::group::{enumerate_dual, GroupId, IrrepIndex, IrrepLabel};
use crate::linalg::{self, CMatrix, CompensatedSum};
use crate::optimize::golden_section;
use crate::{Error, Result};

/// Hermiticity tolerance on `max |σ − σ*|`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalue floor below which a symbol is not positive semi-definite.
pub const PSD_FLOOR: f64 = -1e-12;

/// Parametric family of a symbol. Scalar families are multiples of the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymbolFamily {
    /// `σ(ξ) = e^{−t λ_ξ} I`
    Heat { t: f64 },
    /// `σ(ξ) = ⟨ξ⟩^{−β} I`
    Polynomial { beta: f64 },
    /// `σ(ξ) = e^{−2ω ⟨ξ⟩^γ} I`
    Subgaussian { omega: f64, gamma: f64 },
    /// Arbitrary matrices supplied per label.
    Custom,
}

impl SymbolFamily {
    /// Scalar profile as a function of the weight `w = ⟨ξ⟩`.
    pub fn decay(&self) -> Option<Decay> {
        match *self {
            SymbolFamily::Heat { t } => Some(Decay::Gaussian { t }),
            SymbolFamily::Polynomial { beta } => Some(Decay::Power { p: beta }),
            SymbolFamily::Subgaussian { omega, gamma } => Some(Decay::Stretched { c: 2.0 * omega, gamma }),
            SymbolFamily::Custom => None,
        }
    }

    /// Family of the positive square root.
    fn sqrt(&self) -> SymbolFamily {
        match *self {
            SymbolFamily::Heat { t } => SymbolFamily::Heat { t: t / 2.0 },
            SymbolFamily::Polynomial { beta } => SymbolFamily::Polynomial { beta: beta / 2.0 },
            SymbolFamily::Subgaussian { omega, gamma } => SymbolFamily::Subgaussian { omega: omega / 2.0, gamma },
            SymbolFamily::Custom => SymbolFamily::Custom,
        }
    }

    fn validate(&self, group: GroupId) -> Result<()> {
        let n = group.dimension() as f64;
        match *self {
            SymbolFamily::Heat { t } if !(t > 0.0 && t.is_finite()) => {
                Err(Error::InvalidParameter(format!("heat time t = {t} must be positive")))
            }
            SymbolFamily::Polynomial { beta } if !(beta > n && beta.is_finite()) => Err(Error::InvalidParameter(
                format!("polynomial order β = {beta} must exceed the group dimension {n} for a trace-class symbol"),
            )),
            SymbolFamily::Subgaussian { omega, gamma } if !(omega > 0.0 && gamma > 0.0 && omega.is_finite() && gamma.is_finite()) => {
                Err(Error::InvalidParameter(format!("subgaussian parameters ω = {omega}, γ = {gamma} must be positive")))
            }
            _ => Ok(()),
        }
    }
}

/// A symbol truncated to `A_Λ`: one matrix per label, labels in dual order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolField {
    group: GroupId,
    truncation: f64,
    family: SymbolFamily,
    labels: Vec<IrrepLabel>,
    matrices: Vec<CMatrix>,
}

impl SymbolField {
    pub fn group(&self) -> GroupId {
        self.group
    }

    /// The truncation `Λ`; the support is exactly `A_Λ`.
    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    pub fn family(&self) -> SymbolFamily {
        self.family
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

    pub fn get(&self, index: IrrepIndex) -> Option<&CMatrix> {
        self.labels.iter().position(|l| l.index == index).map(|i| &self.matrices[i])
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `Σ d_ξ Tr σ(ξ)` over labels with `⟨ξ⟩ ≤ lambda`.
    pub fn weighted_trace_within(&self, lambda: f64) -> f64 {
        self.iter()
            .filter(|(l, _)| l.within(lambda))
            .map(|(l, m)| l.dim as f64 * linalg::trace(m).re)
            .collect::<CompensatedSum>()
            .value()
    }

    /// Same field with every matrix multiplied by `s`.
    pub fn scaled(&self, s: f64) -> SymbolField {
        SymbolField {
            family: SymbolFamily::Custom,
            matrices: self.matrices.iter().map(|m| m.map(|z| z * s)).collect(),
            ..self.clone()
        }
    }
}

/// Build a parametric symbol on `A_Λ`.
pub fn make_symbol(group: GroupId, family: SymbolFamily, lambda_max: f64) -> Result<SymbolField> {
    if family == SymbolFamily::Custom {
        return Err(Error::InvalidParameter("custom symbols are built with custom_symbol".into()));
    }
    family.validate(group)?;
    let labels = enumerate_dual(group, lambda_max)?;
    let matrices = labels
        .iter()
        .map(|l| {
            let s = scalar_profile(&family, l);
            CMatrix::from_diagonal_element(l.dim, l.dim, Complex64::new(s, 0.0))
        })
        .collect();
    Ok(SymbolField { group, truncation: lambda_max, family, labels, matrices })
}

fn scalar_profile(family: &SymbolFamily, l: &IrrepLabel) -> f64 {
    match *family {
        SymbolFamily::Heat { t } => libm::exp(-t * l.eigenvalue),
        SymbolFamily::Polynomial { beta } => libm::pow(l.weight(), -beta),
        SymbolFamily::Subgaussian { omega, gamma } => libm::exp(-2.0 * omega * libm::pow(l.weight(), gamma)),
        SymbolFamily::Custom => unreachable!("custom symbols have no profile"),
    }
}

/// User-supplied matrices in the order of `enumerate_dual(group, lambda_max)`.
/// Each must be Hermitian to [`HERMITIAN_TOL`].
pub fn custom_symbol(group: GroupId, lambda_max: f64, matrices: Vec<CMatrix>) -> Result<SymbolField> {
    let s = custom_symbol_unchecked(group, lambda_max, matrices)?;
    for (l, m) in s.iter() {
        let defect = linalg::hermitian_defect(m);
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidParameter(format!(
                "matrix at {:?} is not Hermitian (defect {defect:e})",
                l.index
            )));
        }
    }
    Ok(s)
}

/// Like [`custom_symbol`] but skipping the Hermitian check, so that
/// hypothesis violations can be studied. Dimensions are still enforced.
pub fn custom_symbol_unchecked(group: GroupId, lambda_max: f64, matrices: Vec<CMatrix>) -> Result<SymbolField> {
    let labels = enumerate_dual(group, lambda_max)?;
    if labels.len() != matrices.len() {
        return Err(Error::InvalidParameter(format!(
            "expected {} matrices for the support, got {}",
            labels.len(),
            matrices.len()
        )));
    }
    for (l, m) in labels.iter().zip(&matrices) {
        if m.nrows() != l.dim || m.ncols() != l.dim {
            return Err(Error::InvalidParameter(format!(
                "matrix at {:?} is {}×{}, expected {}×{}",
                l.index,
                m.nrows(),
                m.ncols(),
                l.dim,
                l.dim
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("matrix at {:?} has non-finite entries", l.index)));
        }
    }
    Ok(SymbolField { group, truncation: lambda_max, family: SymbolFamily::Custom, labels, matrices })
}

/// Custom symbol from a per-label generator (checked like [`custom_symbol`]).
pub fn symbol_from_fn<F: FnMut(&IrrepLabel) -> CMatrix>(group: GroupId, lambda_max: f64, f: F) -> Result<SymbolField> {
    let labels = enumerate_dual(group, lambda_max)?;
    custom_symbol(group, lambda_max, labels.iter().map(f).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolDiagnostics {
    /// Smallest eigenvalue of the Hermitian parts over the support.
    pub min_eigenvalue: f64,
    pub max_op_norm: f64,
    /// `Σ_{support} d_ξ Tr σ(ξ)` (real part).
    pub partial_trace_norm: f64,
    /// Bound on the same sum beyond the support; `None` for custom symbols.
    pub tail_bound: Option<f64>,
    pub hermitian_defect: f64,
    pub certified: bool,
}

pub fn check_hermitian_psd(symbol: &SymbolField) -> SymbolDiagnostics {
    let mut min_eigenvalue = f64::INFINITY;
    let mut max_op_norm: f64 = 0.0;
    let mut hermitian_defect: f64 = 0.0;
    for m in &symbol.matrices {
        hermitian_defect = hermitian_defect.max(linalg::hermitian_defect(m));
        min_eigenvalue = min_eigenvalue.min(linalg::hermitian_eigenvalues(m)[0]);
        max_op_norm = max_op_norm.max(linalg::op_norm(m));
    }
    let certified = hermitian_defect <= HERMITIAN_TOL && min_eigenvalue >= PSD_FLOOR;
    SymbolDiagnostics {
        min_eigenvalue,
        max_op_norm,
        partial_trace_norm: symbol.weighted_trace_within(f64::INFINITY),
        tail_bound: tail_bound(symbol),
        hermitian_defect,
        certified,
    }
}

pub fn is_certified(symbol: &SymbolField) -> bool {
    check_hermitian_psd(symbol).certified
}

fn require_certified(symbol: &SymbolField) -> Result<()> {
    if is_certified(symbol) {
        Ok(())
    } else {
        Err(Error::NotCertified)
    }
}

/// Bound on `Σ_{⟨ξ⟩ > Λ} d_ξ Tr σ(ξ)` for the parametric families.
fn tail_bound(symbol: &SymbolField) -> Option<f64> {
    symbol.family.decay().map(|d| tail_sum_bound(symbol.group, &d, symbol.truncation))
}

/// Positive square root `H(ξ) = σ(ξ)^{1/2}`, label by label.
pub fn sqrt_symbol(symbol: &SymbolField) -> Result<SymbolField> {
    require_certified(symbol)?;
    if symbol.family != SymbolFamily::Custom {
        return make_symbol(symbol.group, symbol.family.sqrt(), symbol.truncation);
    }
    Ok(SymbolField {
        matrices: symbol.matrices.iter().map(linalg::psd_sqrt).collect(),
        ..symbol.clone()
    })
}

/// `(partial, tail)` with `‖T‖_{S¹} ∈ [partial, partial + tail]`; the tail is
/// `None` when the symbol has no known continuation beyond `Λ`.
pub fn trace_norm(symbol: &SymbolField) -> Result<(f64, Option<f64>)> {
    require_certified(symbol)?;
    Ok((symbol.weighted_trace_within(f64::INFINITY), tail_bound(symbol)))
}

/// `(w, value)` pairs with one entry per distinct weight, taking the worst
/// case among labels of equal weight according to `pick_max`.
fn per_weight<F: Fn(&IrrepLabel, &CMatrix) -> f64>(symbol: &SymbolField, f: F, pick_max: bool) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (l, m) in symbol.iter() {
        let v = f(l, m);
        let w = l.weight();
        match out.last_mut() {
            Some((lw, lv)) if (*lw - w).abs() <= 1e-12 * w => {
                *lv = if pick_max { lv.max(v) } else { lv.min(v) };
            }
            _ => out.push((w, v)),
        }
    }
    out
}

/// Trace-order fit: `Tr σ(ξ) ≤ b d_ξ ⟨ξ⟩^{−β}` on the support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOrderFit {
    pub beta: f64,
    /// Witnessing constant on the support (not a tight constant).
    pub b: f64,
}

/// Needs at least this many distinct weights on the support.
pub const MIN_DISTINCT_WEIGHTS: usize = 10;

pub fn classify_trace_order(symbol: &SymbolField) -> Result<TraceOrderFit> {
    require_certified(symbol)?;
    let pts = per_weight(symbol, |l, m| linalg::trace(m).re / l.dim as f64, true);
    if pts.len() < MIN_DISTINCT_WEIGHTS {
        return Err(Error::DegenerateFit(format!(
            "{} distinct weights on the support, need {MIN_DISTINCT_WEIGHTS}",
            pts.len()
        )));
    }
    if pts.iter().any(|(_, v)| !(*v > 0.0)) {
        return Err(Error::DegenerateFit("trace vanishes on part of the support".into()));
    }
    let upper = &pts[pts.len() / 2..];
    let xs: Vec<f64> = upper.iter().map(|(w, _)| libm::log(*w)).collect();
    let ys: Vec<f64> = upper.iter().map(|(_, v)| libm::log(*v)).collect();
    let fit = linalg::fit_line(&xs, &ys).ok_or_else(|| Error::DegenerateFit("all weights equal".into()))?;
    let beta = -fit.slope;
    let b = pts.iter().map(|(w, v)| v * libm::pow(*w, beta)).fold(0.0, f64::max);
    Ok(TraceOrderFit { beta, b })
}

/// Determinant-order fit: `det σ(ξ)^{1/d_ξ} ≥ a² e^{−2ω ⟨ξ⟩^γ}` on the support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetOrderFit {
    pub gamma: f64,
    pub omega: f64,
    /// Witnessing constant on the support.
    pub a: f64,
    /// The best exponent sits at the bottom of the search range or the fitted
    /// decay is not a decay: no stretched-exponential bound fits.
    pub degenerate: bool,
}

const GAMMA_RANGE: (f64, f64) = (1e-3, 8.0);
/// Fitted exponents below this are reported as degenerate.
pub const GAMMA_DEGENERATE: f64 = 0.05;

pub fn classify_det_order(symbol: &SymbolField) -> Result<DetOrderFit> {
    require_certified(symbol)?;
    let mut pts = Vec::with_capacity(symbol.len());
    for (l, m) in symbol.iter() {
        let ev = linalg::hermitian_eigenvalues(m);
        if !(ev[0] > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let log_det: f64 = ev.iter().map(|e| libm::log(*e)).sum();
        pts.push((l.weight(), log_det / l.dim as f64));
    }
    // collapse equal weights, keeping the smallest value
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut uniq: Vec<(f64, f64)> = Vec::new();
    for (w, y) in pts {
        match uniq.last_mut() {
            Some((lw, ly)) if (*lw - w).abs() <= 1e-12 * w => *ly = ly.min(y),
            _ => uniq.push((w, y)),
        }
    }
    if uniq.len() < 3 {
        return Err(Error::DegenerateFit(format!("{} distinct weights, need 3", uniq.len())));
    }
    let ys: Vec<f64> = uniq.iter().map(|p| p.1).collect();
    let rss_at = |log_gamma: f64| -> f64 {
        let g = libm::exp(log_gamma);
        let xs: Vec<f64> = uniq.iter().map(|(w, _)| libm::pow(*w, g)).collect();
        linalg::fit_line(&xs, &ys).map_or(f64::INFINITY, |f| f.rss)
    };
    let (lo, hi) = (libm::log(GAMMA_RANGE.0), libm::log(GAMMA_RANGE.1));
    let steps = 200;
    let h = (hi - lo) / steps as f64;
    let mut best = (0usize, f64::INFINITY);
    for i in 0..=steps {
        let r = rss_at(lo + i as f64 * h);
        if r < best.1 {
            best = (i, r);
        }
    }
    let a0 = lo + (best.0.saturating_sub(1)) as f64 * h;
    let b0 = (lo + (best.0 + 1) as f64 * h).min(hi);
    let m = golden_section(rss_at, a0, b0, 1e-12);
    let gamma = libm::exp(m.x);
    let xs: Vec<f64> = uniq.iter().map(|(w, _)| libm::pow(*w, gamma)).collect();
    let fit = linalg::fit_line(&xs, &ys).ok_or_else(|| Error::DegenerateFit("all weights equal".into()))?;
    let omega = -fit.slope / 2.0;
    // largest a with a² e^{−2ω w^γ} ≤ det^{1/d} at every weight
    let log_a2 = uniq
        .iter()
        .zip(&xs)
        .map(|((_, y), x)| y + 2.0 * omega * x)
        .fold(f64::INFINITY, f64::min);
    let a = libm::exp(log_a2 / 2.0);
    let degenerate = gamma < GAMMA_DEGENERATE || !(omega > 0.0);
    Ok(DetOrderFit { gamma, omega, a, degenerate })
}
