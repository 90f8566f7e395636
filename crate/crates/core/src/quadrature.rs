//! Haar quadrature, Haar sampling and Peter–Weyl orthogonality checks.
//!
//! Tori use the uniform product grid with `r` points per angle. SU(2) uses
//! `r` equispaced values of `α ∈ [0, 2π)`, `r` equispaced values of
//! `γ ∈ [0, 4π)` and `r` Gauss–Legendre nodes in `cos β`. With these choices a
//! grid of resolution `r` integrates every product of two matrix
//! coefficients with twice-spins (or frequencies) summing below `r` exactly.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::group::{GroupId, GroupPoint, IrrepIndex, IrrepLabel, Su2};
use crate::linalg::{CMatrix, CompensatedSum};
use crate::rng::{stream, StreamId};
use crate::{Error, Result};

/// Gauss–Legendre nodes and weights on `[−1, 1]` (Newton on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Weighted point set approximating normalised Haar measure.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    group: GroupId,
    resolution: usize,
    points: Vec<GroupPoint>,
    weights: Vec<f64>,
    covering_radius: f64,
}

impl QuadratureGrid {
    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn points(&self) -> &[GroupPoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Upper bound on the distance (see [`GroupPoint::distance`]) from any
    /// group element to its nearest grid point.
    pub fn covering_radius(&self) -> f64 {
        self.covering_radius
    }

    pub fn integrate<F: FnMut(&GroupPoint) -> Complex64>(&self, mut f: F) -> Complex64 {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (p, w) in self.points.iter().zip(&self.weights) {
            let v = f(p) * *w;
            re.add(v.re);
            im.add(v.im);
        }
        Complex64::new(re.value(), im.value())
    }

    /// Is `∫ ξ_ij · conj(ξ'_kl)` integrated exactly for every pair drawn from `labels`?
    pub fn resolves_products(&self, labels: &[IrrepLabel]) -> bool {
        let r = self.resolution as u64;
        match self.group {
            GroupId::Torus1 | GroupId::Torus2 => {
                let mut max = [0u64; 2];
                for l in labels {
                    match l.index {
                        IrrepIndex::Circle(k) => max[0] = max[0].max(k.unsigned_abs()),
                        IrrepIndex::Torus(k1, k2) => {
                            max[0] = max[0].max(k1.unsigned_abs());
                            max[1] = max[1].max(k2.unsigned_abs());
                        }
                        IrrepIndex::Spin(_) => return false,
                    }
                }
                2 * max[0] < r && 2 * max[1] < r
            }
            GroupId::Su2 => {
                let mut max = 0u64;
                for l in labels {
                    match l.index {
                        IrrepIndex::Spin(m) => max = max.max(m as u64),
                        _ => return false,
                    }
                }
                // α, γ: twice-frequency 2m < r; β: polynomial degree m in cos β ≤ 2r − 1
                2 * max < r && max < 2 * r
            }
        }
    }
}

/// Quadrature grid of the given resolution, certified at construction.
pub fn haar_grid(group: GroupId, resolution: usize) -> Result<QuadratureGrid> {
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!("grid resolution {resolution} must be at least 2")));
    }
    let r = resolution;
    let step = TAU / r as f64;
    let (points, weights, covering_radius) = match group {
        GroupId::Torus1 => {
            let pts = (0..r).map(|i| GroupPoint::Circle(i as f64 * step)).collect();
            (pts, alloc::vec![1.0 / r as f64; r], step / 2.0)
        }
        GroupId::Torus2 => {
            let mut pts = Vec::with_capacity(r * r);
            for i in 0..r {
                for j in 0..r {
                    pts.push(GroupPoint::Torus([i as f64 * step, j as f64 * step]));
                }
            }
            let h = step / 2.0;
            (pts, alloc::vec![1.0 / (r * r) as f64; r * r], libm::sqrt(2.0 * h * h))
        }
        GroupId::Su2 => {
            let (nodes, gl_weights) = gauss_legendre(r);
            // nodes ascend in cos β, so β descends
            let betas: Vec<f64> = nodes.iter().map(|&c| libm::acos(c)).collect();
            let mut pts = Vec::with_capacity(r * r * r);
            let mut ws = Vec::with_capacity(r * r * r);
            let gstep = 2.0 * TAU / r as f64;
            for ia in 0..r {
                for (ib, beta) in betas.iter().enumerate() {
                    for ig in 0..r {
                        pts.push(GroupPoint::Su2(Su2::from_euler(ia as f64 * step, *beta, ig as f64 * gstep)));
                        ws.push(gl_weights[ib] / (2.0 * (r * r) as f64));
                    }
                }
            }
            // largest gap in β, including the poles
            let mut sorted = betas.clone();
            sorted.sort_by(f64::total_cmp);
            let mut beta_gap: f64 = sorted[0].max(PI - sorted[r - 1]) * 2.0;
            for w in sorted.windows(2) {
                beta_gap = beta_gap.max(w[1] - w[0]);
            }
            // triangle inequality over the three Euler factors
            let radius = step / 2.0 + beta_gap / 2.0 + gstep / 2.0;
            (pts, ws, radius)
        }
    };
    let grid = QuadratureGrid { group, resolution, points, weights, covering_radius };
    certify(&grid)?;
    Ok(grid)
}

/// Self-test: unit mass and exact integration of the characters the grid
/// claims to resolve.
fn certify(grid: &QuadratureGrid) -> Result<()> {
    let mass = crate::linalg::compensated_sum(grid.weights.iter().copied());
    if (mass - 1.0).abs() > 1e-12 {
        return Err(Error::InadequateResolution {
            resolution: grid.resolution,
            what: format!("unit Haar mass (got {mass})"),
        });
    }
    let r = grid.resolution as i64;
    let probes: Vec<IrrepLabel> = match grid.group {
        GroupId::Torus1 => (0..r).map(|k| IrrepIndex::Circle(k).label()).collect(),
        GroupId::Torus2 => (0..r).flat_map(|k| [IrrepIndex::Torus(k, 0), IrrepIndex::Torus(0, k)]).map(|i| i.label()).collect(),
        GroupId::Su2 => (0..r as u32).map(|m| IrrepIndex::Spin(m).label()).collect(),
    };
    for l in probes {
        let integral = grid.integrate(|p| l.character(p).unwrap_or_default());
        let expect = if l.eigenvalue == 0.0 { 1.0 } else { 0.0 };
        if (integral - Complex64::new(expect, 0.0)).norm() > 1e-10 {
            return Err(Error::InadequateResolution {
                resolution: grid.resolution,
                what: format!("character {:?} (integral {integral})", l.index),
            });
        }
    }
    Ok(())
}

/// `count` Haar-distributed points; deterministic given `seed`.
pub fn sample_haar(group: GroupId, count: usize, seed: u64) -> Vec<GroupPoint> {
    let mut rng = stream(seed, StreamId::Haar);
    sample_haar_with(group, count, &mut rng)
}

pub fn sample_haar_with<R: Rng>(group: GroupId, count: usize, rng: &mut R) -> Vec<GroupPoint> {
    (0..count)
        .map(|_| match group {
            GroupId::Torus1 => GroupPoint::Circle(rng.random::<f64>() * TAU),
            GroupId::Torus2 => GroupPoint::Torus([rng.random::<f64>() * TAU, rng.random::<f64>() * TAU]),
            GroupId::Su2 => loop {
                let g: [f64; 4] = [
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                ];
                let n = g.iter().map(|x| x * x).sum::<f64>();
                if n > 1e-20 {
                    break GroupPoint::Su2(Su2::new(Complex64::new(g[0], g[1]), Complex64::new(g[2], g[3])));
                }
            },
        })
        .collect()
}

/// Largest deviation of the grid Gram matrix of `{√d_ξ ξ_ij}` from the identity.
///
/// Refuses grids that cannot integrate the required products exactly.
pub fn verify_orthogonality(group: GroupId, labels: &[IrrepLabel], grid: &QuadratureGrid) -> Result<f64> {
    if grid.group() != group {
        return Err(Error::PointMismatch(group));
    }
    if labels.iter().any(|l| l.group() != group) {
        return Err(Error::LabelMismatch(group));
    }
    if !grid.resolves_products(labels) {
        let worst = labels.iter().map(|l| l.weight()).fold(1.0, f64::max);
        return Err(Error::InadequateResolution {
            resolution: grid.resolution(),
            what: format!("products of coefficients up to weight {worst:.3}"),
        });
    }
    let ncols: usize = labels.iter().map(|l| l.dim * l.dim).sum();
    let npts = grid.len();
    // rows: grid points scaled by √w; columns: √d ξ_ij
    let mut phi = CMatrix::zeros(npts, ncols);
    for (row, (p, w)) in grid.points().iter().zip(grid.weights()).enumerate() {
        let sw = libm::sqrt(*w);
        let mut col = 0;
        for l in labels {
            let m = l.evaluate(p)?;
            let s = libm::sqrt(l.dim as f64) * sw;
            for v in m.iter() {
                phi[(row, col)] = *v * s;
                col += 1;
            }
        }
    }
    let gram = phi.adjoint() * &phi;
    let mut worst: f64 = 0.0;
    for i in 0..ncols {
        for j in 0..ncols {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::enumerate_dual;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(6);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // ∫ x^10 = 2/11, degree 10 ≤ 2·6 − 1
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * libm::pow(*x, 10.0)).sum();
        assert!((v - 2.0 / 11.0).abs() < 1e-14);
        let (x1, w1) = gauss_legendre(1);
        assert_eq!((x1[0], w1[0]), (0.0, 2.0));
    }

    #[test]
    fn circle_grid_is_trapezoid_rule() {
        let g = haar_grid(GroupId::Torus1, 8).unwrap();
        assert_eq!(g.len(), 8);
        assert!(g.weights().iter().all(|w| *w == 0.125));
        let g16 = haar_grid(GroupId::Torus1, 16).unwrap();
        assert!((g16.integrate(|_| Complex64::new(1.0, 0.0)).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn schur_norm_of_spin_half() {
        // ∫ |ξ_ij|² dμ = 1/d_ξ
        let g = haar_grid(GroupId::Su2, 12).unwrap();
        let l = IrrepIndex::Spin(1).label();
        for i in 0..2 {
            for j in 0..2 {
                let v = g.integrate(|p| Complex64::new(l.evaluate(p).unwrap()[(i, j)].norm_sqr(), 0.0));
                assert!((v.re - 0.5).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn too_coarse_resolution_is_refused() {
        assert!(haar_grid(GroupId::Su2, 1).is_err());
        let g = haar_grid(GroupId::Su2, 4).unwrap();
        let labels: Vec<_> = (0..=8).map(|m| IrrepIndex::Spin(m).label()).collect();
        assert!(matches!(
            verify_orthogonality(GroupId::Su2, &labels, &g),
            Err(Error::InadequateResolution { .. })
        ));
    }

    #[test]
    fn orthogonality_on_small_grids() {
        let g = haar_grid(GroupId::Torus1, 8).unwrap();
        let labels = enumerate_dual(GroupId::Torus1, 2.0).unwrap();
        assert!(verify_orthogonality(GroupId::Torus1, &labels, &g).unwrap() <= 1e-12);

        let g = haar_grid(GroupId::Su2, 12).unwrap();
        let labels = enumerate_dual(GroupId::Su2, 2.0).unwrap();
        assert!(verify_orthogonality(GroupId::Su2, &labels, &g).unwrap() <= 1e-10);

        let g = haar_grid(GroupId::Torus2, 6).unwrap();
        let labels = enumerate_dual(GroupId::Torus2, 2.3).unwrap();
        assert!(verify_orthogonality(GroupId::Torus2, &labels, &g).unwrap() <= 1e-12);
    }

    #[test]
    fn haar_sampling_is_deterministic() {
        let a = sample_haar(GroupId::Torus1, 3, 42);
        let b = sample_haar(GroupId::Torus1, 3, 42);
        assert_eq!(a, b);
        assert_ne!(a, sample_haar(GroupId::Torus1, 3, 43));
    }

    #[test]
    fn empirical_characters_vanish() {
        let pts = sample_haar(GroupId::Su2, 1000, 7);
        let l = IrrepIndex::Spin(2).label();
        let mean: f64 = pts.iter().map(|p| l.character(p).unwrap().re).sum::<f64>() / 1000.0;
        assert!(mean.abs() < 0.1, "{mean}");

        let pts = sample_haar(GroupId::Torus2, 500, 1);
        let l = IrrepIndex::Torus(1, 1).label();
        let mean: Complex64 = pts.iter().map(|p| l.evaluate(p).unwrap()[(0, 0)]).sum::<Complex64>() / 500.0;
        assert!(mean.norm() < 0.1, "{mean}");
    }

    #[test]
    fn covering_radius_bounds_nearest_grid_point() {
        for (group, res) in [(GroupId::Torus1, 10), (GroupId::Torus2, 6), (GroupId::Su2, 6)] {
            let g = haar_grid(group, res).unwrap();
            for p in sample_haar(group, 100, 9) {
                let nearest = g.points().iter().map(|q| p.distance(q).unwrap()).fold(f64::INFINITY, f64::min);
                assert!(nearest <= g.covering_radius() + 1e-12);
            }
        }
    }
}
