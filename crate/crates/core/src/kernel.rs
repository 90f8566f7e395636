//! Kernels `K(x, y) = Σ d_ξ Tr[ξ(x) σ(ξ) ξ(y)*]` truncated to `A_Λ`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::group::{GroupId, GroupPoint};
use crate::linalg::{self, CMatrix, ComplexSum, CompensatedSum};
use crate::symbol::{is_certified, sqrt_symbol, SymbolField};
use crate::{Error, Result};

/// A kernel built from a symbol on `A_Λ`. The square-root field is present
/// exactly when the symbol is certified Hermitian positive semi-definite;
/// RKHS operations require it.
#[derive(Debug, Clone)]
pub struct TruncatedKernel {
    symbol: SymbolField,
    sqrt: Option<SymbolField>,
}

impl TruncatedKernel {
    pub fn new(symbol: SymbolField) -> Self {
        let sqrt = if is_certified(&symbol) { sqrt_symbol(&symbol).ok() } else { None };
        Self { symbol, sqrt }
    }

    pub fn group(&self) -> GroupId {
        self.symbol.group()
    }

    pub fn truncation(&self) -> f64 {
        self.symbol.truncation()
    }

    pub fn symbol(&self) -> &SymbolField {
        &self.symbol
    }

    pub fn sqrt(&self) -> Result<&SymbolField> {
        self.sqrt.as_ref().ok_or(Error::NotCertified)
    }

    pub fn is_certified(&self) -> bool {
        self.sqrt.is_some()
    }

    fn check_point(&self, x: &GroupPoint) -> Result<()> {
        if x.group() == self.group() {
            Ok(())
        } else {
            Err(Error::PointMismatch(self.group()))
        }
    }

    /// `K(x, y)`, summed in dual order with compensation.
    pub fn eval(&self, x: &GroupPoint, y: &GroupPoint) -> Result<Complex64> {
        self.check_point(x)?;
        self.check_point(y)?;
        let mut acc = ComplexSum::new();
        for (l, s) in self.symbol.iter() {
            let ax = l.evaluate(x)? * s;
            let by = l.evaluate(y)?;
            acc.add(linalg::hs_inner(&ax, &by) * l.dim as f64);
        }
        Ok(acc.value())
    }

    /// Gram matrix `G_ij = K(x_i, x_j)` and the smallest eigenvalue of its
    /// Hermitian part.
    pub fn gram(&self, points: &[GroupPoint]) -> Result<(CMatrix, f64)> {
        for p in points {
            self.check_point(p)?;
        }
        let n = points.len();
        let mut acc = alloc::vec![ComplexSum::new(); n * n];
        for (l, s) in self.symbol.iter() {
            let evals: Vec<CMatrix> = points.iter().map(|p| l.evaluate(p)).collect::<Result<_>>()?;
            let left: Vec<CMatrix> = evals.iter().map(|e| e * s).collect();
            let d = l.dim as f64;
            for i in 0..n {
                for j in 0..n {
                    acc[i * n + j].add(linalg::hs_inner(&left[i], &evals[j]) * d);
                }
            }
        }
        let g = CMatrix::from_fn(n, n, |i, j| acc[i * n + j].value());
        let min_eig = if n == 0 { 0.0 } else { linalg::hermitian_eigenvalues(&g)[0] };
        Ok((g, min_eig))
    }

    /// `max |K(gx, gy) − K(x, y)|` over the pairs.
    pub fn check_invariance(&self, pairs: &[(GroupPoint, GroupPoint)], g: &GroupPoint) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (x, y) in pairs {
            let base = self.eval(x, y)?;
            let moved = self.eval(&g.mul(x)?, &g.mul(y)?)?;
            worst = worst.max((moved - base).norm());
        }
        Ok(worst)
    }

    /// `max |K(x, y) − conj K(y, x)|` over the pairs.
    pub fn symmetry_defect(&self, pairs: &[(GroupPoint, GroupPoint)]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (x, y) in pairs {
            worst = worst.max((self.eval(x, y)? - self.eval(y, x)?.conj()).norm());
        }
        Ok(worst)
    }

    /// `L = Σ d_ξ ⟨ξ⟩ ‖σ(ξ)‖_{S¹}` with `|K(x, y) − K(x', y)| ≤ L · dist(x, x')`.
    pub fn lipschitz(&self) -> f64 {
        self.symbol
            .iter()
            .map(|(l, s)| {
                let s1: f64 = linalg::hermitian_eigenvalues(s).iter().map(|e| e.abs()).sum();
                l.dim as f64 * l.weight() * s1
            })
            .collect::<CompensatedSum>()
            .value()
    }

    /// `(Σ d_ξ ⟨ξ⟩² Tr σ(ξ))^{1/2}`: Lipschitz constant of every RKHS function
    /// of unit coefficient norm.
    pub fn function_lipschitz(&self) -> f64 {
        libm::sqrt(
            self.symbol
                .iter()
                .map(|(l, s)| l.dim as f64 * l.weight_sq() * linalg::trace(s).re.max(0.0))
                .collect::<CompensatedSum>()
                .value(),
        )
    }
}

/// `K(x, y)`.
pub fn eval_kernel(kernel: &TruncatedKernel, x: &GroupPoint, y: &GroupPoint) -> Result<Complex64> {
    kernel.eval(x, y)
}

/// Gram matrix and the smallest eigenvalue of its Hermitian part.
pub fn kernel_gram(kernel: &TruncatedKernel, points: &[GroupPoint]) -> Result<(CMatrix, f64)> {
    kernel.gram(points)
}

/// `max |K(gx, gy) − K(x, y)|` over the pairs.
pub fn check_invariance(kernel: &TruncatedKernel, pairs: &[(GroupPoint, GroupPoint)], g: &GroupPoint) -> Result<f64> {
    kernel.check_invariance(pairs, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::IrrepIndex;
    use crate::quadrature::sample_haar;
    use crate::symbol::{custom_symbol_unchecked, make_symbol, symbol_from_fn, trace_norm, SymbolFamily};

    fn heat(g: GroupId, t: f64, lam: f64) -> TruncatedKernel {
        TruncatedKernel::new(make_symbol(g, SymbolFamily::Heat { t }, lam).unwrap())
    }

    fn pairs(g: GroupId, count: usize, seed: u64) -> Vec<(GroupPoint, GroupPoint)> {
        let p = sample_haar(g, 2 * count, seed);
        p.chunks(2).map(|c| (c[0], c[1])).collect()
    }

    #[test]
    fn diagonal_is_partial_trace_norm() {
        for g in [GroupId::Torus1, GroupId::Torus2, GroupId::Su2] {
            let k = heat(g, 0.5, 5.0);
            let (p, _) = trace_norm(k.symbol()).unwrap();
            for x in sample_haar(g, 5, 3) {
                let v = k.eval(&x, &x).unwrap();
                assert!((v.re - p).abs() <= 1e-12 * p && v.im.abs() <= 1e-12 * p);
            }
        }
    }

    #[test]
    fn theta_value_at_zero_difference() {
        let k = heat(GroupId::Torus1, 1.0, 12.0);
        let x = GroupPoint::Circle(1.3);
        assert!((k.eval(&x, &x).unwrap().re - 1.772_637_204_826_652).abs() < 1e-6);
    }

    #[test]
    fn zero_symbol_kernel_vanishes() {
        let z = TruncatedKernel::new(symbol_from_fn(GroupId::Su2, 3.0, |l| CMatrix::zeros(l.dim, l.dim)).unwrap());
        for (x, y) in pairs(GroupId::Su2, 5, 1) {
            assert_eq!(z.eval(&x, &y).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn gram_of_heat_is_psd() {
        let k = heat(GroupId::Su2, 0.5, 6.0);
        let pts = sample_haar(GroupId::Su2, 20, 8);
        let (g, min_eig) = k.gram(&pts).unwrap();
        let tr: f64 = g.diagonal().iter().map(|z| z.re).sum();
        assert!(linalg::hermitian_defect(&g) <= 1e-10);
        assert!(min_eig >= -1e-8 * tr);
        let (g1, e1) = k.gram(&pts[..1]).unwrap();
        assert!((g1[(0, 0)].re - e1).abs() < 1e-12);
    }

    #[test]
    fn negative_symbol_gives_indefinite_gram() {
        let s = symbol_from_fn(GroupId::Torus1, 4.0, |l| {
            let v = if l.index == IrrepIndex::Circle(2) { -1.0 } else { 0.1 };
            CMatrix::from_element(1, 1, Complex64::new(v, 0.0))
        })
        .unwrap();
        let k = TruncatedKernel::new(s);
        assert!(!k.is_certified());
        let found = (0..20u64).any(|seed| {
            let (g, min) = k.gram(&sample_haar(GroupId::Torus1, 8, seed)).unwrap();
            let tr: f64 = g.diagonal().iter().map(|z| z.re).sum();
            min < -1e-3 * tr.abs().max(1.0)
        });
        assert!(found);
    }

    #[test]
    fn invariance_under_translation() {
        for (g, tol) in [(GroupId::Torus1, 1e-10), (GroupId::Torus2, 1e-10), (GroupId::Su2, 1e-9)] {
            let k = heat(g, 0.5, 5.0);
            let ps = pairs(g, 50, 4);
            assert_eq!(k.check_invariance(&ps, &g.identity()).unwrap(), 0.0);
            let shift = sample_haar(g, 1, 99)[0];
            assert!(k.check_invariance(&ps, &shift).unwrap() <= tol);
            assert!(k.symmetry_defect(&ps).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn non_hermitian_symbol_breaks_symmetry() {
        let labels = crate::group::enumerate_dual(GroupId::Su2, 1.5).unwrap();
        let mats = alloc::vec![
            CMatrix::identity(1, 1),
            CMatrix::from_row_slice(
                2,
                2,
                &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ),
        ];
        assert_eq!(labels.len(), mats.len());
        let k = TruncatedKernel::new(custom_symbol_unchecked(GroupId::Su2, 1.5, mats).unwrap());
        assert!(k.symmetry_defect(&pairs(GroupId::Su2, 10, 2)).unwrap() > 1e-3);
    }

    #[test]
    fn lipschitz_bound_holds_on_close_pairs() {
        for g in [GroupId::Torus1, GroupId::Su2] {
            let k = heat(g, 0.3, 6.0);
            let l = k.lipschitz();
            let y = sample_haar(g, 1, 5)[0];
            for (x, other) in pairs(g, 30, 6) {
                // move x a little towards a random direction
                let dir = match (x, other) {
                    (GroupPoint::Circle(a), GroupPoint::Circle(b)) => GroupPoint::Circle(a + 1e-3 * (b - a)),
                    (GroupPoint::Su2(a), GroupPoint::Su2(b)) => GroupPoint::Su2(crate::group::Su2::new(
                        a.a + (b.a - a.a) * 1e-3,
                        a.b + (b.b - a.b) * 1e-3,
                    )),
                    _ => unreachable!(),
                };
                let dist = x.distance(&dir).unwrap();
                let diff = (k.eval(&x, &y).unwrap() - k.eval(&dir, &y).unwrap()).norm();
                assert!(diff <= l * dist * (1.0 + 1e-9) + 1e-13);
            }
        }
    }
}
