//! Closed-form covering-number bounds for the embedding of the RKHS into
//! `C(G)`, the one-dimensional optimisations behind them, and the
//! volumetric lower bound of finite truncations.
//!
//! Everything is on the natural-log scale: a returned value `v` stands for
//! `ln C(ε) ≤ v` (upper) or `ln C(ε) ≥ v` (lower).

use alloc::format;
use alloc::vec::Vec;

use crate::counting::fit_counting_constants;
use crate::group::GroupId;
use crate::linalg::{self, CompensatedSum};
use crate::optimize::{minimize_above, Minimum};
use crate::symbol::{classify_det_order, classify_trace_order, trace_norm, SymbolField};
use crate::{Error, Result};

/// How `b` and `a` relate to the trace norm `S1 = ‖T‖_{S¹}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstantConvention {
    /// `Tr σ(ξ) ≤ b·S1·d⟨ξ⟩^{−β}` and `det σ(ξ)^{1/d} ≥ a²·S1·e^{−2ω⟨ξ⟩^γ}`.
    #[default]
    RelativeToTrace,
    /// `Tr σ(ξ) ≤ b·d⟨ξ⟩^{−β}` and `det σ(ξ)^{1/d} ≥ a²·e^{−2ω⟨ξ⟩^γ}`.
    Absolute,
}

impl ConstantConvention {
    pub fn name(self) -> &'static str {
        match self {
            ConstantConvention::RelativeToTrace => "relative",
            ConstantConvention::Absolute => "absolute",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "relative" => Some(ConstantConvention::RelativeToTrace),
            "absolute" => Some(ConstantConvention::Absolute),
            _ => None,
        }
    }
}

/// Constants of the upper bound: trace order `β > n` with constant `b`,
/// tail constant `κ` and rank constant `C_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperConstants {
    pub beta: f64,
    pub b: f64,
    pub kappa: f64,
    pub c_n: f64,
}

/// Constants of the lower bound: determinant order `γ` with constants
/// `ω`, `a`, moment constant `μ` and rank constant `c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerConstants {
    pub gamma: f64,
    pub omega: f64,
    pub a: f64,
    pub mu: f64,
    pub c0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParameters {
    /// Group dimension.
    pub n: usize,
    /// Trace norm `‖T‖_{S¹}`.
    pub s1: f64,
    pub convention: ConstantConvention,
    pub upper: Option<UpperConstants>,
    pub lower: Option<LowerConstants>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must be positive and finite")))
    }
}

impl BoundParameters {
    fn upper_checked(&self) -> Result<UpperConstants> {
        let u = self.upper.ok_or_else(|| Error::InvalidParameter("no upper-bound constants".into()))?;
        positive("S1", self.s1)?;
        positive("b", u.b)?;
        positive("κ", u.kappa)?;
        positive("C_n", u.c_n)?;
        if !(u.beta > self.n as f64) || !u.beta.is_finite() {
            return Err(Error::InvalidParameter(format!("β = {} must exceed n = {}", u.beta, self.n)));
        }
        Ok(u)
    }

    fn lower_checked(&self) -> Result<LowerConstants> {
        let l = self.lower.ok_or_else(|| Error::InvalidParameter("no lower-bound constants".into()))?;
        positive("S1", self.s1)?;
        for (name, v) in [("γ", l.gamma), ("ω", l.omega), ("a", l.a), ("μ", l.mu), ("c0", l.c0)] {
            positive(name, v)?;
        }
        Ok(l)
    }

    /// `b` in the relative convention.
    fn relative_b(&self, u: &UpperConstants) -> f64 {
        match self.convention {
            ConstantConvention::RelativeToTrace => u.b,
            ConstantConvention::Absolute => u.b / self.s1,
        }
    }

    /// `a` in the relative convention.
    fn relative_a(&self, l: &LowerConstants) -> f64 {
        match self.convention {
            ConstantConvention::RelativeToTrace => l.a,
            ConstantConvention::Absolute => l.a / libm::sqrt(self.s1),
        }
    }

    /// Largest admissible `ε` (exclusive) for the upper bound: `√S1/√3`.
    pub fn upper_validity(&self) -> f64 {
        libm::sqrt(self.s1) / libm::sqrt(3.0)
    }

    /// Largest admissible `ε` (exclusive) for the lower bound:
    /// `a√S1·exp(−ωμ(1+γ/n)/c0)`, where the maximiser of `G_ε` leaves `(1, ∞)`.
    pub fn lower_validity(&self) -> Result<f64> {
        let l = self.lower_checked()?;
        let n = self.n as f64;
        let a = self.relative_a(&l);
        Ok(a * libm::sqrt(self.s1) * libm::exp(-l.omega * l.mu * (1.0 + l.gamma / n) / l.c0))
    }
}

/// `C_n (4bκS1)^{n/(β−n)} ε^{−2n/(β−n)} ln(1 + 4√S1/ε)`, or `None` outside
/// `0 < ε < √S1/√3`.
pub fn upper_bound(params: &BoundParameters, eps: f64) -> Result<Option<f64>> {
    let u = params.upper_checked()?;
    if !(eps > 0.0 && eps < params.upper_validity()) {
        return Ok(None);
    }
    let n = params.n as f64;
    let r = n / (u.beta - n);
    let b = params.relative_b(&u);
    let log_v = libm::log(u.c_n) + r * libm::log(4.0 * b * u.kappa * params.s1) - 2.0 * r * libm::log(eps)
        + libm::log(libm::log1p(4.0 * libm::sqrt(params.s1) / eps));
    Ok(Some(libm::exp(log_v)))
}

/// Numeric minimiser of `ln H_ε` next to the plug-in point `λ_ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HMinimum {
    pub lambda_star: f64,
    pub ln_h_star: f64,
    pub lambda_eps: f64,
    pub ln_h_eps: f64,
    /// Left end of the domain, `(bκ/ε'²)^{1/(β−n)}`.
    pub lambda_valid: f64,
    pub optimizer: Minimum,
}

/// `ln H_ε(λ) = C_n λⁿ ln[1 + 2√(1 − bκλ^{n−β}) / (ε' − √(bκ) λ^{(n−β)/2})]`
/// in units where `‖Q‖ = 1` (`ε' = ε/√S1`). `None` off the domain.
pub fn ln_h(params: &BoundParameters, eps: f64, lambda: f64) -> Result<Option<f64>> {
    let u = params.upper_checked()?;
    let n = params.n as f64;
    let e = eps / libm::sqrt(params.s1);
    let bk = params.relative_b(&u) * u.kappa;
    let tail = bk * libm::pow(lambda, n - u.beta);
    let denom = e - libm::sqrt(tail);
    if !(denom > 0.0) || !(tail < 1.0) {
        return Ok(None);
    }
    let inner = 2.0 * libm::sqrt(1.0 - tail) / denom;
    Ok(Some(u.c_n * libm::pow(lambda, n) * libm::log1p(inner)))
}

/// Minimise `ln H_ε` on `(λ_valid, ∞)`; requires `ε/√S1 < 1/√3`.
pub fn minimize_h(params: &BoundParameters, eps: f64) -> Result<HMinimum> {
    let u = params.upper_checked()?;
    if !(eps > 0.0 && eps < params.upper_validity()) {
        return Err(Error::InvalidParameter(format!(
            "ε = {eps} outside (0, {}) for the upper bound",
            params.upper_validity()
        )));
    }
    let n = params.n as f64;
    let e = eps / libm::sqrt(params.s1);
    let bk = params.relative_b(&u) * u.kappa;
    let lambda_valid = libm::pow(bk / (e * e), 1.0 / (u.beta - n));
    let lambda_eps = libm::pow(4.0 * bk / (e * e), 1.0 / (u.beta - n));
    let f = |l: f64| ln_h(params, eps, l).ok().flatten().unwrap_or(f64::INFINITY);
    let optimizer = minimize_above(f, lambda_valid, lambda_eps, 1e-10)?;
    let ln_h_eps = f(lambda_eps);
    Ok(HMinimum {
        lambda_star: optimizer.x,
        ln_h_star: optimizer.value,
        lambda_eps,
        ln_h_eps,
        lambda_valid,
        optimizer,
    })
}

/// `(c0/(ωμ(1+γ/n)))^{n/γ} · c0/(1+n/γ) · (ln[a√S1/ε])^{1+n/γ}`, or `None`
/// outside the validity range.
pub fn lower_bound(params: &BoundParameters, eps: f64) -> Result<Option<f64>> {
    let l = params.lower_checked()?;
    if !(eps > 0.0 && eps < params.lower_validity()?) {
        return Ok(None);
    }
    let n = params.n as f64;
    let big_l = libm::log(params.relative_a(&l) * libm::sqrt(params.s1) / eps);
    let wm = l.omega * l.mu;
    let log_v = (n / l.gamma) * libm::log(l.c0 / (wm * (1.0 + l.gamma / n))) + libm::log(l.c0 / (1.0 + n / l.gamma))
        + (1.0 + n / l.gamma) * libm::log(big_l);
    Ok(Some(libm::exp(log_v)))
}

/// `G_ε(λ) = −ωμ λ^{n+γ} + c0 λⁿ ln(a√S1/ε)`.
pub fn g_function(params: &BoundParameters, eps: f64, lambda: f64) -> Result<f64> {
    let l = params.lower_checked()?;
    let n = params.n as f64;
    let big_l = libm::log(params.relative_a(&l) * libm::sqrt(params.s1) / eps);
    Ok(-l.omega * l.mu * libm::pow(lambda, n + l.gamma) + l.c0 * libm::pow(lambda, n) * big_l)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GMaximum {
    pub lambda_star: f64,
    pub g_max: f64,
}

/// Numeric maximisation of `G_ε` over `(1, ∞)` within the validity range.
pub fn maximize_g(params: &BoundParameters, eps: f64) -> Result<GMaximum> {
    let l = params.lower_checked()?;
    let limit = params.lower_validity()?;
    if !(eps > 0.0 && eps < limit) {
        return Err(Error::InvalidParameter(format!("ε = {eps} outside (0, {limit}) for the lower bound")));
    }
    let n = params.n as f64;
    let big_l = libm::log(params.relative_a(&l) * libm::sqrt(params.s1) / eps);
    // start from the scale where both terms of G are comparable
    let start = 1.0 + libm::pow(l.c0 * big_l / (l.omega * l.mu), 1.0 / l.gamma);
    let m = minimize_above(|x| -g_function(params, eps, x).unwrap_or(f64::NAN), 1.0, start, 1e-12)?;
    let _ = n;
    Ok(GMaximum { lambda_star: m.x, g_max: -m.value })
}

/// `ln[∏_{⟨ξ⟩≤λ} det σ(ξ)^{d_ξ/2} / ε^D]` with `D = Σ_{⟨ξ⟩≤λ} d_ξ²`: the
/// volumetric lower bound for `ln C(ε, L_{A_λ})`. Negative values are vacuous.
pub fn det_lower_bound(symbol: &SymbolField, lambda: f64, eps: f64) -> Result<f64> {
    let trunc = symbol.truncation();
    if !(lambda > 1.0) || lambda > trunc {
        return Err(Error::InvalidParameter(format!("λ = {lambda} outside (1, {trunc}]")));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("ε = {eps} must be positive")));
    }
    let mut acc = CompensatedSum::new();
    let mut dim = 0usize;
    for (l, m) in symbol.iter().filter(|(l, _)| l.within(lambda)) {
        if linalg::hermitian_defect(m) > crate::symbol::HERMITIAN_TOL {
            return Err(Error::NotCertified);
        }
        let ev = linalg::hermitian_eigenvalues(m);
        if !(ev[0] > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        for e in ev {
            acc.add(0.5 * l.dim as f64 * libm::log(e));
        }
        dim += l.dim * l.dim;
    }
    acc.add(-(dim as f64) * libm::log(eps));
    Ok(acc.value())
}

/// Fit every constant of both bounds from a symbol, witnessing on its support.
/// A regime is `None` when its hypotheses fail (`β̂ ≤ n`, or no usable
/// determinant order).
pub fn fit_bound_parameters(symbol: &SymbolField, convention: ConstantConvention) -> Result<BoundParameters> {
    let group: GroupId = symbol.group();
    let n = group.dimension();
    let (s1, _) = trace_norm(symbol)?;
    let trunc = symbol.truncation();
    let upper = match classify_trace_order(symbol) {
        Ok(fit) if fit.beta > n as f64 => {
            let c = fit_counting_constants(group, trunc, Some(fit.beta), None)?;
            let b = match convention {
                ConstantConvention::RelativeToTrace => fit.b / s1,
                ConstantConvention::Absolute => fit.b,
            };
            Some(UpperConstants { beta: fit.beta, b, kappa: c.kappa.unwrap_or(f64::NAN), c_n: c.c_n })
        }
        _ => None,
    };
    let lower = match classify_det_order(symbol) {
        Ok(fit) if !fit.degenerate => {
            let c = fit_counting_constants(group, trunc, None, Some(fit.gamma))?;
            let a = match convention {
                ConstantConvention::RelativeToTrace => fit.a / libm::sqrt(s1),
                ConstantConvention::Absolute => fit.a,
            };
            Some(LowerConstants { gamma: fit.gamma, omega: fit.omega, a, mu: c.mu.unwrap_or(f64::NAN), c0: c.c0 })
        }
        _ => None,
    };
    Ok(BoundParameters { n, s1, convention, upper, lower })
}

/// Bound values over an `ε` grid; `None` marks points outside a theorem's
/// validity range (or a missing regime).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub params: BoundParameters,
    pub eps: Vec<f64>,
    pub ln_upper: Vec<Option<f64>>,
    pub ln_lower: Vec<Option<f64>>,
    /// Volumetric bound at the given `λ`, when a symbol is supplied.
    pub ln_det_lower: Vec<Option<f64>>,
    pub det_lambda: Option<f64>,
}

pub fn bound_curve(params: &BoundParameters, eps: &[f64], det: Option<(&SymbolField, f64)>) -> BoundCurve {
    let ln_upper = eps.iter().map(|e| upper_bound(params, *e).ok().flatten()).collect();
    let ln_lower = eps.iter().map(|e| lower_bound(params, *e).ok().flatten()).collect();
    let ln_det_lower = eps
        .iter()
        .map(|e| det.and_then(|(s, l)| det_lower_bound(s, l, *e).ok()))
        .collect();
    BoundCurve { params: *params, eps: eps.to_vec(), ln_upper, ln_lower, ln_det_lower, det_lambda: det.map(|d| d.1) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{make_symbol, symbol_from_fn, SymbolFamily};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn unit_upper() -> BoundParameters {
        BoundParameters {
            n: 1,
            s1: 1.0,
            convention: ConstantConvention::RelativeToTrace,
            upper: Some(UpperConstants { beta: 3.0, b: 1.0, kappa: 1.0, c_n: 1.0 }),
            lower: Some(LowerConstants { gamma: 1.0, omega: 1.0, a: 1.0, mu: 1.0, c0: 1.0 }),
        }
    }

    #[test]
    fn worked_upper_value() {
        let v = upper_bound(&unit_upper(), 0.1).unwrap().unwrap();
        let expect = 20.0 * libm::log(41.0);
        assert!((v - expect).abs() <= 1e-12 * expect);
        assert!((v - 74.27).abs() < 0.01);
        assert_eq!(upper_bound(&unit_upper(), 1.0 / libm::sqrt(3.0)).unwrap(), None);
    }

    #[test]
    fn upper_grows_with_trace_norm() {
        let p = unit_upper();
        let q = BoundParameters { s1: 2.0, ..p };
        for i in 1..50 {
            let e = 0.01 * i as f64;
            if let (Some(a), Some(b)) = (upper_bound(&p, e).unwrap(), upper_bound(&q, e).unwrap()) {
                assert!(b > a);
            }
        }
    }

    #[test]
    fn beta_must_exceed_dimension() {
        let mut p = unit_upper();
        p.upper.as_mut().unwrap().beta = 1.0;
        assert!(upper_bound(&p, 0.1).is_err());
    }

    #[test]
    fn plug_in_point_and_chain() {
        let m = minimize_h(&unit_upper(), 0.1).unwrap();
        assert!((m.lambda_eps - 20.0).abs() < 1e-12);
        let upper = upper_bound(&unit_upper(), 0.1).unwrap().unwrap();
        assert!(m.ln_h_star <= m.ln_h_eps && m.ln_h_eps <= upper);
        let near = 1.0 / libm::sqrt(3.0) - 1e-6;
        let m = minimize_h(&unit_upper(), near).unwrap();
        assert!((m.lambda_valid - libm::sqrt(1.0 / (near * near))).abs() < 1e-9);
        assert!(m.ln_h_star <= m.ln_h_eps && m.ln_h_eps <= upper_bound(&unit_upper(), near).unwrap().unwrap());
    }

    #[test]
    fn worked_lower_value() {
        let p = unit_upper();
        let e = libm::exp(-4.0);
        let v = lower_bound(&p, e).unwrap().unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        let g = maximize_g(&p, e).unwrap();
        assert!((g.lambda_star - 2.0).abs() < 1e-6, "{}", g.lambda_star);
        assert!((g.g_max - 4.0).abs() < 1e-9 * 4.0);
        assert_eq!(lower_bound(&p, libm::exp(-2.0)).unwrap(), None);
        assert!(maximize_g(&p, libm::exp(-2.0)).is_err());
    }

    #[test]
    fn maximiser_approaches_one_at_the_boundary() {
        let p = unit_upper();
        let g = maximize_g(&p, libm::exp(-2.0) * (1.0 - 1e-6)).unwrap();
        assert!(g.lambda_star > 1.0 && g.lambda_star < 1.0 + 1e-5);
        assert!(g.g_max > 0.0);
    }

    #[test]
    fn absolute_convention_rescales() {
        let rel = BoundParameters { s1: 4.0, ..unit_upper() };
        let mut abs = rel;
        abs.convention = ConstantConvention::Absolute;
        abs.upper.as_mut().unwrap().b = 4.0;
        abs.lower.as_mut().unwrap().a = 2.0;
        for e in [0.05, 0.1, 0.2] {
            assert_eq!(upper_bound(&rel, e).unwrap(), upper_bound(&abs, e).unwrap());
            assert_eq!(lower_bound(&rel, e).unwrap(), lower_bound(&abs, e).unwrap());
        }
    }

    #[test]
    fn det_bound_three_modes() {
        let s = make_symbol(GroupId::Torus1, SymbolFamily::Heat { t: 1.0 }, 12.0).unwrap();
        for e in [0.01, 0.1, 0.5] {
            let v = det_lower_bound(&s, 2.0, e).unwrap();
            assert!((v - (-1.0 + 3.0 * libm::log(1.0 / e))).abs() < 1e-13);
        }
        assert!(det_lower_bound(&s, 2.0, 5.0).unwrap() < 0.0);
        let single = symbol_from_fn(GroupId::Torus1, 1.2, |_| crate::linalg::CMatrix::from_element(1, 1, Complex64::new(0.25, 0.0))).unwrap();
        assert!((det_lower_bound(&single, 1.2, 0.1).unwrap() - libm::log(0.5 / 0.1)).abs() < 1e-14);
    }

    #[test]
    fn fitted_parameters_for_heat() {
        let s = make_symbol(GroupId::Torus1, SymbolFamily::Heat { t: 1.0 }, 12.0).unwrap();
        let p = fit_bound_parameters(&s, ConstantConvention::RelativeToTrace).unwrap();
        assert!(p.upper.is_some() && p.lower.is_some());
        let l = p.lower.unwrap();
        assert!((l.gamma - 2.0).abs() < 0.05);
        // both theorems at once: upper ≥ lower where both are valid
        for i in 1..200 {
            let e = 1e-4 * libm::pow(1.05, i as f64);
            if let (Some(u), Some(lo)) = (upper_bound(&p, e).unwrap(), lower_bound(&p, e).unwrap()) {
                assert!(u >= lo, "ε = {e}: {u} < {lo}");
            }
        }
    }

    proptest! {
        #[test]
        fn lower_is_exact_maximum(
            n in 1usize..4, gamma in 0.3f64..3.0, c0 in 0.2f64..3.0, wm in 0.2f64..3.0,
            a in 0.5f64..3.0, s1 in 0.5f64..3.0, depth in 0.05f64..5.0,
        ) {
            let p = BoundParameters {
                n, s1, convention: ConstantConvention::RelativeToTrace, upper: None,
                lower: Some(LowerConstants { gamma, omega: wm, a, mu: 1.0, c0 }),
            };
            let e = p.lower_validity().unwrap() * libm::exp(-depth);
            let closed = lower_bound(&p, e).unwrap().unwrap();
            let g = maximize_g(&p, e).unwrap();
            prop_assert!((g.g_max - closed).abs() <= 1e-9 * closed.abs());
            prop_assert!(lower_bound(&p, e / 2.0).unwrap().unwrap() > closed);
        }

        #[test]
        fn upper_chain_holds(beta in 1.2f64..6.0, bk in 0.05f64..4.0, cn in 0.3f64..3.0, frac in 0.01f64..0.999) {
            let p = BoundParameters {
                n: 1, s1: 1.0, convention: ConstantConvention::RelativeToTrace, lower: None,
                upper: Some(UpperConstants { beta, b: bk, kappa: 1.0, c_n: cn }),
            };
            let e = frac * p.upper_validity();
            let m = minimize_h(&p, e).unwrap();
            let u = upper_bound(&p, e).unwrap().unwrap();
            prop_assert!(m.ln_h_star <= m.ln_h_eps * (1.0 + 1e-12));
            prop_assert!(m.ln_h_eps <= u * (1.0 + 1e-12));
        }
    }
}
