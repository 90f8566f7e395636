//! Weighted counts over the dual, Weyl-exponent fits, rank bounds and tails.
//!
//! Sums of the form `Σ d_ξ² g(⟨ξ⟩)` with `g` nonincreasing are evaluated
//! exactly on a finite window. Remainders beyond a weight `L` are bounded by
//! integral comparison:
//!
//! - T¹: `Σ_{|k| ≥ k₀} g(⟨k⟩) ≤ 2 [g(⟨k₀⟩) + ∫_{k₀}^∞ g]`;
//! - T²: each lattice point owns the unit square on its side of the origin,
//!   so `Σ_{|k| > R} g(⟨k⟩) ≤ 2π ∫_{R−√2}^∞ r g(r) dr`;
//! - SU(2): with `K = m + 1`, `⟨ξ⟩ ≥ K/2` and
//!   `Σ_{K ≥ K₁} K² g(K/2) ≤ ∫_{(K₁−1)/2}^∞ 2(2u+1)² g(u) du`.
//!
//! `g` is extended by `g(1)` below 1, which keeps it nonincreasing. The
//! moment integrals are closed forms (powers, incomplete gamma functions).

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use crate::group::{enumerate_dual, GroupId};
use crate::linalg::{fit_line, CompensatedSum};
use crate::symbol::{is_certified, SymbolField};
use crate::{Error, Result};

/// Nonincreasing profile `g(w)` for `w ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// `w^{−p}`
    Power { p: f64 },
    /// `e^{−t (w² − 1)}`
    Gaussian { t: f64 },
    /// `e^{−c w^γ}`
    Stretched { c: f64, gamma: f64 },
}

impl Decay {
    pub fn value(&self, w: f64) -> f64 {
        match *self {
            Decay::Power { p } => libm::pow(w, -p),
            Decay::Gaussian { t } => libm::exp(-t * (w * w - 1.0)),
            Decay::Stretched { c, gamma } => libm::exp(-c * libm::pow(w, gamma)),
        }
    }

    /// `∫_a^∞ u^j g(max(u, 1)) du` for `a ≥ 0`.
    fn moment_tail(&self, j: u32, a: f64) -> f64 {
        let jf = j as f64;
        let mut below = 0.0;
        if a < 1.0 {
            below = self.value(1.0) * (1.0 - libm::pow(a.max(0.0), jf + 1.0)) / (jf + 1.0);
        }
        let lo = a.max(1.0);
        let above = match *self {
            Decay::Power { p } => {
                if p <= jf + 1.0 {
                    f64::INFINITY
                } else {
                    libm::pow(lo, jf + 1.0 - p) / (p - jf - 1.0)
                }
            }
            Decay::Gaussian { t } => {
                let s = (jf + 1.0) / 2.0;
                libm::exp(t - core::f64::consts::LN_2 - s * libm::log(t) + ln_upper_gamma(s, t * lo * lo))
            }
            Decay::Stretched { c, gamma } => {
                let s = (jf + 1.0) / gamma;
                libm::exp(-libm::log(gamma) - s * libm::log(c) + ln_upper_gamma(s, c * libm::pow(lo, gamma)))
            }
        };
        below + above
    }
}

/// `ln Γ(s, x)` for `s > 0`, `x ≥ 0` (series below `s + 1`, continued fraction above).
fn ln_upper_gamma(s: f64, x: f64) -> f64 {
    let lg = libm::lgamma(s);
    if x <= 0.0 {
        return lg;
    }
    if x < s + 1.0 {
        let mut term = 1.0 / s;
        let mut sum = term;
        let mut k = s;
        for _ in 0..100_000 {
            k += 1.0;
            term *= x / k;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        let ln_p = -x + s * libm::log(x) + libm::log(sum) - lg;
        let p = libm::exp(ln_p);
        lg + libm::log1p(-p.min(1.0))
    } else {
        // modified Lentz
        let tiny = 1e-300;
        let mut b = x + 1.0 - s;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..100_000 {
            let an = -(i as f64) * (i as f64 - s);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        -x + s * libm::log(x) + libm::log(h)
    }
}

/// `Σ d_ξ² f(⟨ξ⟩)` over labels with `lo < ⟨ξ⟩ ≤ hi` (compensated).
pub fn sum_between<F: Fn(f64) -> f64>(group: GroupId, lo: f64, hi: f64, f: F) -> f64 {
    let mut acc = CompensatedSum::new();
    if !(hi > lo) {
        return 0.0;
    }
    let (lo2, hi2) = (lo * lo, hi * hi);
    match group {
        GroupId::Torus1 => {
            let kmax = libm::floor(libm::sqrt((hi2 - 1.0).max(0.0))) as i64 + 1;
            for k in 0..=kmax {
                let w2 = 1.0 + (k * k) as f64;
                if w2 > lo2 && w2 <= hi2 {
                    let v = f(libm::sqrt(w2));
                    acc.add(if k == 0 { v } else { 2.0 * v });
                }
            }
        }
        GroupId::Torus2 => {
            let kmax = libm::floor(libm::sqrt((hi2 - 1.0).max(0.0))) as i64 + 1;
            for k1 in -kmax..=kmax {
                let rest = hi2 - 1.0 - (k1 * k1) as f64;
                if rest < 0.0 {
                    continue;
                }
                let k2max = libm::floor(libm::sqrt(rest)) as i64 + 1;
                for k2 in -k2max..=k2max {
                    let w2 = 1.0 + (k1 * k1 + k2 * k2) as f64;
                    if w2 > lo2 && w2 <= hi2 {
                        acc.add(f(libm::sqrt(w2)));
                    }
                }
            }
        }
        GroupId::Su2 => {
            let mut m = 0u64;
            loop {
                let mf = m as f64;
                let w2 = 1.0 + mf * (mf + 2.0) / 4.0;
                if w2 > hi2 {
                    break;
                }
                if w2 > lo2 {
                    acc.add((mf + 1.0) * (mf + 1.0) * f(libm::sqrt(w2)));
                }
                m += 1;
            }
        }
    }
    acc.value()
}

/// Integral-comparison bound on `Σ_{⟨ξ⟩ > beyond} d_ξ² g(⟨ξ⟩)`, `beyond ≥ 1`.
pub fn remainder_bound(group: GroupId, decay: &Decay, beyond: f64) -> f64 {
    let l2 = beyond * beyond;
    match group {
        GroupId::Torus1 => {
            let mut k0 = libm::floor(libm::sqrt((l2 - 1.0).max(0.0))) as i64;
            while 1.0 + (k0 * k0) as f64 <= l2 {
                k0 += 1;
            }
            let k0f = k0 as f64;
            2.0 * (decay.value(libm::sqrt(1.0 + k0f * k0f)) + decay.moment_tail(0, k0f))
        }
        GroupId::Torus2 => {
            let r = libm::sqrt((l2 - 1.0).max(0.0));
            2.0 * PI * decay.moment_tail(1, (r - SQRT_2).max(0.0))
        }
        GroupId::Su2 => {
            // K = m + 1 with (K² + 3)/4 > L²
            let mut k1 = libm::floor(libm::sqrt((4.0 * l2 - 3.0).max(0.0))) as i64;
            while ((k1 * k1) as f64 + 3.0) / 4.0 <= l2 {
                k1 += 1;
            }
            let a = (k1 as f64 - 1.0) / 2.0;
            2.0 * (4.0 * decay.moment_tail(2, a) + 4.0 * decay.moment_tail(1, a) + decay.moment_tail(0, a))
        }
    }
}

/// Largest weight summed exactly before switching to [`remainder_bound`].
fn exact_window_cap(group: GroupId) -> f64 {
    match group {
        GroupId::Torus1 | GroupId::Su2 => 65_536.0,
        GroupId::Torus2 => 512.0,
    }
}

/// Bound on `Σ_{⟨ξ⟩ > from} d_ξ² g(⟨ξ⟩)`: exact summation on a growing
/// window, then the integral remainder once it is negligible (or the window
/// reaches its size cap).
pub fn tail_sum_bound(group: GroupId, decay: &Decay, from: f64) -> f64 {
    let from = from.max(1.0);
    let cap = exact_window_cap(group).max(from);
    let mut exact = CompensatedSum::new();
    let mut lo = from;
    let mut hi = (4.0 * from).min(cap);
    loop {
        exact.add(sum_between(group, lo, hi, |w| decay.value(w)));
        let rem = remainder_bound(group, decay, hi);
        if rem <= 1e-16 * exact.value() || hi >= cap || rem == 0.0 {
            return exact.value() + rem;
        }
        lo = hi;
        hi = (2.0 * hi).min(cap);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `Σ_{⟨ξ⟩ ≤ λ}`, requires `α > −1`.
    Head,
    /// `Σ_{⟨ξ⟩ > λ}`, requires `α < −1`.
    Tail,
}

/// `Σ d_ξ² ⟨ξ⟩^{αn}` on the head `⟨ξ⟩ ≤ λ` or the tail `⟨ξ⟩ > λ`.
///
/// Tails are summed exactly up to `lambda_max` plus an integral remainder,
/// which must stay below 1% of the finite sum.
pub fn weighted_count(group: GroupId, lambda: f64, alpha: f64, side: Side, lambda_max: f64) -> Result<f64> {
    if !(lambda > 1.0) || !lambda.is_finite() {
        return Err(Error::ThresholdTooSmall(lambda));
    }
    let n = group.dimension() as f64;
    let exponent = alpha * n;
    match side {
        Side::Head => {
            if !(alpha > -1.0) {
                return Err(Error::InvalidParameter(format!("head sums need α > −1, got {alpha}")));
            }
            Ok(sum_between(group, 0.0, lambda, |w| libm::pow(w, exponent)))
        }
        Side::Tail => {
            if !(alpha < -1.0) {
                return Err(Error::InvalidParameter(format!("tail sums need α < −1, got {alpha}")));
            }
            if !(lambda_max >= lambda) {
                return Err(Error::InvalidParameter(format!("cutoff {lambda_max} below λ = {lambda}")));
            }
            let sum = sum_between(group, lambda, lambda_max, |w| libm::pow(w, exponent));
            let remainder = remainder_bound(group, &Decay::Power { p: -exponent }, lambda_max);
            if !(remainder <= 0.01 * sum) {
                return Err(Error::InsufficientCutoff { sum, remainder });
            }
            Ok(sum + remainder)
        }
    }
}

/// `Σ_{⟨ξ⟩ ≤ λ} d_ξ²`, the dimension of `ℓ²(A_λ)`.
pub fn rank_bound(group: GroupId, lambda: f64) -> Result<usize> {
    Ok(enumerate_dual(group, lambda)?.iter().map(|l| l.dim * l.dim).sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylFit {
    /// Estimate of `(α + 1) n`.
    pub exponent: f64,
    pub constant: f64,
}

/// Log-log least squares of the head sums over `lambda_grid`.
///
/// The grid needs at least three points and a span ratio of at least 2.
pub fn fit_weyl_exponent(group: GroupId, alpha: f64, lambda_grid: &[f64]) -> Result<WeylFit> {
    let lo = lambda_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = lambda_grid.iter().copied().fold(0.0, f64::max);
    if lambda_grid.len() < 3 || !(hi >= 2.0 * lo) {
        return Err(Error::DegenerateFit(format!(
            "λ grid of {} points spanning [{lo}, {hi}] is too narrow",
            lambda_grid.len()
        )));
    }
    let mut xs = Vec::with_capacity(lambda_grid.len());
    let mut ys = Vec::with_capacity(lambda_grid.len());
    for &l in lambda_grid {
        xs.push(libm::log(l));
        ys.push(libm::log(weighted_count(group, l, alpha, Side::Head, l)?));
    }
    let f = fit_line(&xs, &ys).ok_or_else(|| Error::DegenerateFit("λ grid has no spread".into()))?;
    Ok(WeylFit { exponent: f.slope, constant: libm::exp(f.intercept) })
}

/// Geometric grid of `count ≥ 2` points from `lo` to `hi`.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let r = libm::log(hi / lo) / (count - 1) as f64;
    (0..count).map(|i| if i + 1 == count { hi } else { lo * libm::exp(r * i as f64) }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingRow {
    pub lambda: f64,
    /// `Σ_{⟨ξ⟩ ≤ λ} d² ⟨ξ⟩^{αn}`
    pub head: f64,
    /// `Σ_{λ < ⟨ξ⟩ ≤ Λ} d² ⟨ξ⟩^{αn}`, plus the analytic remainder beyond `Λ` when `α < −1`.
    pub complement: f64,
    /// `head / λ^{(α+1)n}`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountingRecord {
    pub group: GroupId,
    pub alpha: f64,
    pub truncation: f64,
    pub rows: Vec<CountingRow>,
}

impl CountingRecord {
    /// `(min, max)` of the head ratios: the empirical `≍` band.
    pub fn ratio_band(&self) -> (f64, f64) {
        self.rows
            .iter()
            .fold((f64::INFINITY, 0.0), |(lo, hi), r| (lo.min(r.ratio), hi.max(r.ratio)))
    }
}

pub fn counting_record(group: GroupId, alpha: f64, lambdas: &[f64], truncation: f64) -> Result<CountingRecord> {
    if alpha.is_nan() || alpha == -1.0 {
        return Err(Error::InvalidParameter(format!("α = {alpha} is not admissible")));
    }
    let n = group.dimension() as f64;
    let exponent = alpha * n;
    let g = |w: f64| libm::pow(w, exponent);
    let remainder = if alpha < -1.0 { remainder_bound(group, &Decay::Power { p: -exponent }, truncation) } else { 0.0 };
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        if !(lambda > 1.0) || lambda > truncation {
            return Err(Error::InvalidParameter(format!("λ = {lambda} outside (1, {truncation}]")));
        }
        let head = sum_between(group, 0.0, lambda, g);
        let complement = sum_between(group, lambda, truncation, g) + remainder;
        rows.push(CountingRow { lambda, head, complement, ratio: head / libm::pow(lambda, (alpha + 1.0) * n) });
    }
    Ok(CountingRecord { group, alpha, truncation, rows })
}

/// `δ_λ = (Σ_{⟨ξ⟩ > λ} d_ξ Tr σ(ξ))^{1/2}`: the finite part up to `Λ` plus
/// the family's analytic tail beyond it (custom symbols: no tail).
pub fn tail_delta(symbol: &SymbolField, lambda: f64) -> Result<f64> {
    if !is_certified(symbol) {
        return Err(Error::NotCertified);
    }
    let trunc = symbol.truncation();
    if !(lambda > 1.0) || lambda > trunc {
        return Err(Error::InvalidParameter(format!("λ = {lambda} outside (1, {trunc}]")));
    }
    let finite: f64 = symbol
        .iter()
        .filter(|(l, _)| !l.within(lambda))
        .map(|(l, m)| l.dim as f64 * crate::linalg::trace(m).re)
        .collect::<CompensatedSum>()
        .value();
    let tail = symbol
        .family()
        .decay()
        .map_or(0.0, |d| tail_sum_bound(symbol.group(), &d, trunc));
    Ok(libm::sqrt((finite + tail).max(0.0)))
}

/// Witnessing constants for the counting inequalities, valid for every
/// `λ ∈ (1, upto]`:
///
/// - `c0 λⁿ ≤ Σ_{⟨ξ⟩≤λ} d²`, `Σ_{⟨ξ⟩≤λ} d² ≤ c_n λⁿ`;
/// - `Σ_{⟨ξ⟩>λ} d² ⟨ξ⟩^{−β} ≤ κ λ^{n−β}` when `β` is given;
/// - `Σ_{⟨ξ⟩≤λ} d² ⟨ξ⟩^γ ≤ μ λ^{n+γ}` when `γ` is given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingConstants {
    pub c0: f64,
    pub c_n: f64,
    pub kappa: Option<f64>,
    pub mu: Option<f64>,
}

pub fn fit_counting_constants(group: GroupId, upto: f64, beta: Option<f64>, gamma: Option<f64>) -> Result<CountingConstants> {
    let n = group.dimension() as f64;
    let labels = enumerate_dual(group, upto)?;
    // distinct weights with cumulative d² and d² w^γ up to each
    let mut weights: Vec<f64> = Vec::new();
    let mut counts: Vec<f64> = Vec::new();
    let mut moments: Vec<f64> = Vec::new();
    let (mut count, mut moment) = (CompensatedSum::new(), CompensatedSum::new());
    for l in &labels {
        let w = l.weight();
        let d2 = (l.dim * l.dim) as f64;
        count.add(d2);
        moment.add(d2 * gamma.map_or(0.0, |g| libm::pow(w, g)));
        if weights.last().is_some_and(|lw| (lw - w).abs() <= 1e-12 * w) {
            *counts.last_mut().unwrap() = count.value();
            *moments.last_mut().unwrap() = moment.value();
        } else {
            weights.push(w);
            counts.push(count.value());
            moments.push(moment.value());
        }
    }
    // counts are constant on [w_i, w_{i+1}): the sup of N/λⁿ sits at w_i, the inf at w_{i+1}⁻
    let mut c0 = f64::INFINITY;
    let mut c_n: f64 = 0.0;
    for i in 0..weights.len() {
        let right = weights.get(i + 1).copied().unwrap_or(upto);
        c0 = c0.min(counts[i] / libm::pow(right, n));
        c_n = c_n.max(counts[i] / libm::pow(weights[i].max(1.0), n));
    }
    let kappa = match beta {
        None => None,
        Some(b) if !(b > n) => {
            return Err(Error::InvalidParameter(format!("κ needs β > n, got β = {b}")));
        }
        Some(b) => {
            let beyond = tail_sum_bound(group, &Decay::Power { p: b }, upto);
            // T(λ) = Σ_{⟨ξ⟩>λ}, constant on [w_i, w_{i+1}); λ^{n−β} decreases, so take right ends
            let mut tail = beyond + sum_between(group, 1.0, upto, |w| libm::pow(w, -b));
            let mut k: f64 = 0.0;
            for i in 0..weights.len() {
                if i > 0 {
                    tail -= (counts[i] - counts[i - 1]) * libm::pow(weights[i], -b);
                }
                let right = weights.get(i + 1).copied().unwrap_or(upto);
                k = k.max(tail.max(0.0) / libm::pow(right, n - b));
            }
            Some(k)
        }
    };
    let mu = gamma.map(|g| {
        (0..weights.len()).map(|i| moments[i] / libm::pow(weights[i], n + g)).fold(0.0, f64::max)
    });
    Ok(CountingConstants { c0, c_n, kappa, mu })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{make_symbol, SymbolFamily};
    use proptest::prelude::*;

    #[test]
    fn incomplete_gamma_known_values() {
        // Γ(1, x) = e^{−x}; Γ(1/2, x) = √π erfc(√x)
        for x in [0.1, 1.0, 2.5, 10.0, 40.0] {
            assert!((ln_upper_gamma(1.0, x) + x).abs() < 1e-12, "{x}");
            let expect = libm::log(libm::sqrt(PI) * libm::erfc(libm::sqrt(x)));
            assert!((ln_upper_gamma(0.5, x) - expect).abs() < 1e-10, "{x}");
        }
        assert!((ln_upper_gamma(3.0, 0.0) - libm::log(2.0)).abs() < 1e-14);
    }

    #[test]
    fn head_counts() {
        assert_eq!(weighted_count(GroupId::Torus1, 2.0, 0.0, Side::Head, 2.0).unwrap(), 3.0);
        assert_eq!(weighted_count(GroupId::Su2, 2.0, 0.0, Side::Head, 2.0).unwrap(), 14.0);
        assert_eq!(weighted_count(GroupId::Torus1, 1.0 + 1e-9, 0.0, Side::Head, 2.0).unwrap(), 1.0);
        assert!(weighted_count(GroupId::Torus1, 2.0, -1.5, Side::Head, 2.0).is_err());
        assert!(weighted_count(GroupId::Torus1, 2.0, 0.0, Side::Tail, 2.0).is_err());
    }

    #[test]
    fn rank_bounds() {
        assert_eq!(rank_bound(GroupId::Torus1, 2.0).unwrap(), 3);
        assert_eq!(rank_bound(GroupId::Su2, 2.0).unwrap(), 14);
        assert_eq!(rank_bound(GroupId::Torus2, 1.5).unwrap(), 5);
    }

    #[test]
    fn sum_between_matches_enumeration() {
        for g in [GroupId::Torus1, GroupId::Torus2, GroupId::Su2] {
            for lam in [1.5, 3.3, 7.0, 12.5] {
                let direct: f64 = enumerate_dual(g, lam).unwrap().iter().map(|l| (l.dim * l.dim) as f64 / l.weight()).sum();
                let s = sum_between(g, 0.0, lam, |w| 1.0 / w);
                assert!((s - direct).abs() < 1e-10 * direct);
            }
        }
    }

    fn brute_tail(g: GroupId, decay: &Decay, from: f64, far: f64) -> f64 {
        sum_between(g, from, far, |w| decay.value(w))
    }

    #[test]
    fn remainders_dominate_truth() {
        let decays = [
            Decay::Power { p: 4.5 },
            Decay::Gaussian { t: 0.05 },
            Decay::Gaussian { t: 1.0 },
            Decay::Stretched { c: 0.5, gamma: 0.8 },
        ];
        for g in [GroupId::Torus1, GroupId::Torus2, GroupId::Su2] {
            for d in &decays {
                for from in [1.2, 3.0, 10.0] {
                    let truth = brute_tail(g, d, from, 400.0);
                    let bound = remainder_bound(g, d, from);
                    assert!(bound >= truth, "{g:?} {d:?} {from}: {bound} < {truth}");
                    let tb = tail_sum_bound(g, d, from);
                    assert!(tb >= truth * (1.0 - 1e-12), "{g:?} {d:?} {from}");
                }
            }
        }
    }

    #[test]
    fn polynomial_tail_is_tight_enough() {
        // Σ_{|k|>8} ⟨k⟩^{−3}, compared with a long direct sum plus its integral tail
        let direct = 2.0 * (9..2_000_000u64).map(|k| libm::pow(1.0 + (k as f64) * (k as f64), -1.5)).sum::<f64>();
        let b = weighted_count(GroupId::Torus1, 8.5, -3.0, Side::Tail, 4000.0).unwrap();
        assert!(b >= direct && b <= direct * 1.01, "{b} {direct}");
        assert!(matches!(
            weighted_count(GroupId::Torus1, 8.0, -1.5, Side::Tail, 10.0),
            Err(Error::InsufficientCutoff { .. })
        ));
    }

    #[test]
    fn weyl_exponents() {
        let grid = geometric_grid(8.0, 64.0, 12);
        for (g, n) in [(GroupId::Torus1, 1.0), (GroupId::Torus2, 2.0), (GroupId::Su2, 3.0)] {
            let f = fit_weyl_exponent(g, 0.0, &grid).unwrap();
            assert!((f.exponent - n).abs() < 0.15, "{g:?} {}", f.exponent);
        }
        assert!(fit_weyl_exponent(GroupId::Torus1, 0.0, &[8.0, 9.0, 10.0]).is_err());
    }

    #[test]
    fn ratio_bands_are_narrow() {
        let grid = geometric_grid(8.0, 64.0, 40);
        for g in [GroupId::Torus1, GroupId::Torus2, GroupId::Su2] {
            let n = g.dimension() as f64;
            for alpha in [0.0, 1.0 / n] {
                let rec = counting_record(g, alpha, &grid, 64.0).unwrap();
                let (lo, hi) = rec.ratio_band();
                assert!(hi / lo <= 4.0, "{g:?} {alpha}: [{lo}, {hi}]");
            }
        }
    }

    #[test]
    fn head_plus_complement_is_total() {
        let grid = geometric_grid(1.1, 20.0, 30);
        for g in [GroupId::Torus1, GroupId::Torus2, GroupId::Su2] {
            let rec = counting_record(g, 0.0, &grid, 20.0).unwrap();
            let total = sum_between(g, 0.0, 20.0, |_| 1.0);
            for w in rec.rows.windows(2) {
                assert!(w[1].head >= w[0].head && w[1].complement <= w[0].complement);
            }
            for r in &rec.rows {
                assert_eq!(r.head + r.complement, total);
            }
        }
    }

    #[test]
    fn delta_of_heat_on_circle() {
        let s = make_symbol(GroupId::Torus1, SymbolFamily::Heat { t: 1.0 }, 12.0).unwrap();
        let theta: f64 = (-30i64..=30).map(|k| libm::exp(-((k * k) as f64))).sum();
        let expect = libm::sqrt(theta - 1.0 - 2.0 * libm::exp(-1.0));
        assert!((tail_delta(&s, 2.0).unwrap() - expect).abs() < 1e-9);
        assert!((expect - 0.19203).abs() < 1e-5);
        assert!(tail_delta(&s, 12.0).unwrap() < 1e-20);
        assert!(tail_delta(&s, 13.0).is_err());
    }

    #[test]
    fn delta_of_polynomial_obeys_fitted_kappa() {
        let beta = 3.0;
        let s = make_symbol(GroupId::Torus1, SymbolFamily::Polynomial { beta }, 40.0).unwrap();
        let k = fit_counting_constants(GroupId::Torus1, 40.0, Some(beta), None).unwrap().kappa.unwrap();
        for lam in [4.0, 8.0, 16.0, 32.0] {
            let d = tail_delta(&s, lam).unwrap();
            assert!(d * d <= k * libm::pow(lam, 1.0 - beta) * (1.0 + 1e-12), "{lam}");
        }
    }

    #[test]
    fn counting_constants_witness() {
        for g in [GroupId::Torus1, GroupId::Torus2, GroupId::Su2] {
            let n = g.dimension() as f64;
            let c = fit_counting_constants(g, 20.0, None, Some(1.0)).unwrap();
            for lam in geometric_grid(1.001, 20.0, 300) {
                let count = sum_between(g, 0.0, lam, |_| 1.0);
                assert!(c.c0 * libm::pow(lam, n) <= count * (1.0 + 1e-12));
                assert!(count <= c.c_n * libm::pow(lam, n) * (1.0 + 1e-12));
                let m = sum_between(g, 0.0, lam, |w| w);
                assert!(m <= c.mu.unwrap() * libm::pow(lam, n + 1.0) * (1.0 + 1e-12));
            }
        }
    }

    proptest! {
        #[test]
        fn delta_is_nonincreasing(a in 1.01f64..8.0, b in 1.01f64..8.0, t in 0.05f64..1.5) {
            let s = make_symbol(GroupId::Su2, SymbolFamily::Heat { t }, 8.0).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(tail_delta(&s, hi).unwrap() <= tail_delta(&s, lo).unwrap() + 1e-15);
        }
    }
}
