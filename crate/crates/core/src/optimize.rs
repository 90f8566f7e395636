//! One-dimensional minimisation by golden-section search.

use alloc::format;

use crate::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Result of a one-dimensional minimisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    /// Final bracket `[lo, hi]` containing `x`.
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`,
/// stopping when the bracket is shorter than `tol · (1 + |x|)`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Minimum {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evaluations = 2;
    while hi - lo > tol * (1.0 + x1.abs().max(x2.abs())) && evaluations < 10_000 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        evaluations += 1;
    }
    let (x, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Minimum { x, value, bracket: (lo, hi), evaluations }
}

/// Minimise `f` on the open interval `(lower, ∞)`, starting from `start > lower`.
///
/// The bracket is grown geometrically in the distance to `lower` until the
/// middle point is lowest, then refined by [`golden_section`].
pub fn minimize_above<F: FnMut(f64) -> f64>(mut f: F, lower: f64, start: f64, tol: f64) -> Result<Minimum> {
    if !(start > lower) || !start.is_finite() {
        return Err(Error::OptimizationFailure(format!("start {start} not above {lower}")));
    }
    let at = |s: f64| lower + s;
    // work in the offset s = x − lower
    let mut s_mid = start - lower;
    let mut f_mid = f(at(s_mid));
    let mut s_lo = s_mid / 2.0;
    let mut f_lo = f(at(s_lo));
    let mut s_hi = s_mid * 2.0;
    let mut f_hi = f(at(s_hi));
    let mut evaluations = 3;
    loop {
        if !f_mid.is_nan() && f_mid <= f_lo && f_mid <= f_hi {
            break;
        }
        if evaluations > 4000 {
            return Err(Error::OptimizationFailure(format!(
                "no bracket found; last offsets ({s_lo:e}, {s_mid:e}, {s_hi:e}) with values ({f_lo:e}, {f_mid:e}, {f_hi:e})"
            )));
        }
        if f_lo < f_mid || f_mid.is_nan() {
            s_hi = s_mid;
            f_hi = f_mid;
            s_mid = s_lo;
            f_mid = f_lo;
            s_lo = s_mid / 2.0;
            f_lo = f(at(s_lo));
        } else {
            s_lo = s_mid;
            f_lo = f_mid;
            s_mid = s_hi;
            f_mid = f_hi;
            s_hi = s_mid * 2.0;
            f_hi = f(at(s_hi));
            if !s_hi.is_finite() {
                return Err(Error::OptimizationFailure("objective decreases without bound".into()));
            }
        }
        evaluations += 1;
    }
    let mut m = golden_section(|s| f(at(s)), s_lo, s_hi, tol);
    m.x = at(m.x);
    m.bracket = (at(m.bracket.0), at(m.bracket.1));
    m.evaluations += evaluations;
    if !m.value.is_finite() {
        return Err(Error::OptimizationFailure(format!("non-finite minimum {} at {}", m.value, m.x)));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let m = golden_section(|x| (x - 1.5) * (x - 1.5), 0.0, 4.0, 1e-12);
        assert!((m.x - 1.5).abs() < 1e-9);
        assert!(m.value < 1e-18);
    }

    #[test]
    fn bracket_expansion_to_the_right() {
        let m = minimize_above(|x| (x - 1000.0) * (x - 1000.0), 0.0, 1.0, 1e-12).unwrap();
        assert!((m.x - 1000.0).abs() < 1e-6);
    }

    #[test]
    fn bracket_expansion_towards_boundary() {
        // minimum at 1 + 1e-6
        let m = minimize_above(|x| libm::pow(libm::log(x - 1.0) - libm::log(1e-6), 2.0), 1.0, 5.0, 1e-12).unwrap();
        assert!((m.x - 1.0 - 1e-6).abs() < 1e-12);
    }

    #[test]
    fn monotone_objective_fails() {
        assert!(minimize_above(|x| -x, 0.0, 1.0, 1e-10).is_err());
    }
}
