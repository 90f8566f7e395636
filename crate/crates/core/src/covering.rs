//! Empirical covering and packing numbers of finite-rank truncations
//! `Q_{A_λ}` in the sup norm over a grid, and the truncation bracket.
//!
//! Coefficients are flattened to `u ∈ ℂ^D`, `D = Σ_{⟨ξ⟩≤λ} d_ξ²`, with
//! `u = √d_ξ C(ξ)_{kj}`, so the `ℓ²(A_λ)` unit ball is the Euclidean unit
//! ball of `ℂ^D ≅ ℝ^{2D}` and `(Q C)(x) = Σ_{kj} u_{kj} √d_ξ (ξ(x) H(ξ))_{jk}`.
//! Every row of the resulting matrix has Euclidean norm `‖Q_{A_λ}‖`.
//!
//! Cloud-based counts are estimates for the sampled cloud, except the
//! packing count (grid sup-distances never exceed true sup-distances, so a
//! separated set on the grid is separated in `C(G)`) and the volumetric bound.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::bounds::{det_lower_bound, lower_bound, upper_bound, BoundParameters};
use crate::counting::tail_delta;
use crate::group::{enumerate_dual, GroupId, GroupPoint, IrrepLabel};
use crate::kernel::TruncatedKernel;
use crate::linalg::{self, CMatrix};
use crate::quadrature::QuadratureGrid;
use crate::rkhs::RkhsCoefficients;
use crate::rng::{stream, StreamId};
use crate::{Error, Result};

/// Matrix of `Q_{A_λ}` from flattened coefficients to grid samples.
#[derive(Debug, Clone)]
pub struct TruncatedOperatorMatrix {
    group: GroupId,
    lambda: f64,
    labels: Vec<IrrepLabel>,
    matrix: CMatrix,
    points: Vec<GroupPoint>,
    norm_q_a: f64,
    grid_radius: f64,
    lipschitz: f64,
}

pub fn build_truncated_operator(kernel: &TruncatedKernel, lambda: f64, grid: &QuadratureGrid) -> Result<TruncatedOperatorMatrix> {
    let trunc = kernel.truncation();
    if !(lambda > 1.0) || lambda > trunc {
        return Err(Error::InvalidParameter(format!("λ = {lambda} outside (1, {trunc}]")));
    }
    if grid.group() != kernel.group() {
        return Err(Error::PointMismatch(kernel.group()));
    }
    let h = kernel.sqrt()?;
    let labels: Vec<IrrepLabel> = h.labels().iter().copied().filter(|l| l.within(lambda)).collect();
    let hs: Vec<&CMatrix> = h.iter().filter(|(l, _)| l.within(lambda)).map(|(_, m)| m).collect();
    let cols: usize = labels.iter().map(|l| l.dim * l.dim).sum();
    let rows = grid.len();
    let mut matrix = CMatrix::zeros(rows, cols);
    for (r, p) in grid.points().iter().enumerate() {
        let mut off = 0;
        for (l, hm) in labels.iter().zip(&hs) {
            let xh = l.evaluate(p)? * *hm;
            let s = libm::sqrt(l.dim as f64);
            for k in 0..l.dim {
                for j in 0..l.dim {
                    matrix[(r, off + k * l.dim + j)] = xh[(j, k)] * s;
                }
            }
            off += l.dim * l.dim;
        }
    }
    let norm_q_a = libm::sqrt(kernel.symbol().weighted_trace_within(lambda).max(0.0));
    let lipschitz = libm::sqrt(
        kernel
            .symbol()
            .iter()
            .filter(|(l, _)| l.within(lambda))
            .map(|(l, m)| l.dim as f64 * l.weight_sq() * linalg::trace(m).re.max(0.0))
            .sum::<f64>(),
    );
    Ok(TruncatedOperatorMatrix {
        group: kernel.group(),
        lambda,
        labels,
        matrix,
        points: grid.points().to_vec(),
        norm_q_a,
        grid_radius: grid.covering_radius(),
        lipschitz,
    })
}

impl TruncatedOperatorMatrix {
    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn labels(&self) -> &[IrrepLabel] {
        &self.labels
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn points(&self) -> &[GroupPoint] {
        &self.points
    }

    /// Complex dimension `D` of the coefficient space.
    pub fn complex_dim(&self) -> usize {
        self.matrix.ncols()
    }

    /// `2D`.
    pub fn real_columns(&self) -> usize {
        2 * self.matrix.ncols()
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    /// `‖Q_{A_λ}‖ = (Σ_{⟨ξ⟩≤λ} d Tr σ)^{1/2}`.
    pub fn norm_q_a(&self) -> f64 {
        self.norm_q_a
    }

    /// Largest row norm: the exact grid sup of the unit-ball image.
    pub fn max_row_norm(&self) -> f64 {
        (0..self.rows())
            .map(|r| libm::sqrt(self.matrix.row(r).iter().map(|z| z.norm_sqr()).sum::<f64>()))
            .fold(0.0, f64::max)
    }

    /// Upper bound on `sup_G |f| − max_grid |f|` for `f` in the image of a
    /// ball of radius `r`: Lipschitz constant times grid covering radius.
    pub fn grid_tax(&self, r: f64) -> f64 {
        r * self.lipschitz * self.grid_radius
    }

    /// Flattened coordinates of a coefficient field (restricted to `A_λ`).
    pub fn flatten(&self, c: &RkhsCoefficients) -> Result<Vec<Complex64>> {
        if c.group() != self.group {
            return Err(Error::SupportMismatch);
        }
        let mut out = Vec::with_capacity(self.complex_dim());
        for l in &self.labels {
            let m = c.iter().find(|(cl, _)| cl.index == l.index).map(|(_, m)| m).ok_or(Error::SupportMismatch)?;
            let s = libm::sqrt(l.dim as f64);
            for k in 0..l.dim {
                for j in 0..l.dim {
                    out.push(m[(k, j)] * s);
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        (0..self.rows())
            .map(|r| self.matrix.row(r).iter().zip(u).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Coefficient vectors and their images (interleaved re/im per grid point).
#[derive(Debug, Clone, PartialEq)]
pub struct Cloud {
    rows: usize,
    dim: usize,
    coefficients: Vec<Complex64>,
    images: Vec<f64>,
}

impl Cloud {
    pub fn len(&self) -> usize {
        if self.rows == 0 {
            self.coefficients.len() / self.dim.max(1)
        } else {
            self.images.len() / (2 * self.rows)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn coefficients(&self, i: usize) -> &[Complex64] {
        &self.coefficients[i * self.dim..(i + 1) * self.dim]
    }

    pub fn image(&self, i: usize) -> &[f64] {
        &self.images[i * 2 * self.rows..(i + 1) * 2 * self.rows]
    }

    /// Grid sup-norm of the image of point `i`.
    pub fn sup_norm(&self, i: usize) -> f64 {
        let im = self.image(i);
        let mut m: f64 = 0.0;
        for c in im.chunks_exact(2) {
            m = m.max(c[0] * c[0] + c[1] * c[1]);
        }
        libm::sqrt(m)
    }

    /// Grid sup-distance between the images of two points.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        libm::sqrt(sup_dist_sq(self.image(i), self.image(j)))
    }

    fn push(&mut self, op: &TruncatedOperatorMatrix, u: &[Complex64]) {
        self.coefficients.extend_from_slice(u);
        for v in op.apply(u) {
            self.images.push(v.re);
            self.images.push(v.im);
        }
    }

    /// Points with the given indices, in that order.
    pub fn select(&self, idx: &[usize]) -> Cloud {
        let mut out = Cloud { rows: self.rows, dim: self.dim, coefficients: Vec::new(), images: Vec::new() };
        for &i in idx {
            out.coefficients.extend_from_slice(self.coefficients(i));
            out.images.extend_from_slice(self.image(i));
        }
        out
    }

    /// Cloud made of explicit sample vectors (rows of re/im pairs per point).
    pub fn from_images(rows: usize, images: Vec<f64>) -> Result<Cloud> {
        if rows == 0 || !images.len().is_multiple_of(2 * rows) {
            return Err(Error::InvalidParameter("image buffer does not match the row count".into()));
        }
        Ok(Cloud { rows, dim: 0, coefficients: Vec::new(), images })
    }
}

#[inline]
fn sup_dist_sq(a: &[f64], b: &[f64]) -> f64 {
    let mut m: f64 = 0.0;
    for (x, y) in a.chunks_exact(2).zip(b.chunks_exact(2)) {
        let dr = x[0] - y[0];
        let di = x[1] - y[1];
        m = m.max(dr * dr + di * di);
    }
    m
}

/// Share of cloud points placed on the unit sphere; the rest are uniform in the ball.
const SPHERE_SHARE: f64 = 0.75;

fn draw_ball_point<R: Rng>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let g: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let n = libm::sqrt(g.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if n > 1e-300 {
            let radius = if rng.random::<f64>() < SPHERE_SHARE {
                1.0
            } else {
                libm::pow(rng.random::<f64>(), 1.0 / (2 * dim) as f64)
            };
            return g.into_iter().map(|z| z * (radius / n)).collect();
        }
    }
}

/// Seeded cloud of `count` points of the unit-ball image: the origin first,
/// then antipodal pairs `±u` (so the centroid is exactly zero).
pub fn sample_ball_image(op: &TruncatedOperatorMatrix, count: usize, seed: u64) -> Cloud {
    let mut rng = stream(seed, StreamId::Cloud);
    sample_with(op, count, &mut rng, &[])
}

fn sample_with<R: Rng>(op: &TruncatedOperatorMatrix, count: usize, rng: &mut R, prefix: &[Vec<Complex64>]) -> Cloud {
    let dim = op.complex_dim();
    let mut cloud = Cloud { rows: op.rows(), dim, coefficients: Vec::new(), images: Vec::new() };
    for u in prefix {
        cloud.push(op, u);
    }
    if count == 0 {
        return cloud;
    }
    if prefix.is_empty() {
        cloud.push(op, &alloc::vec![Complex64::new(0.0, 0.0); dim]);
    }
    while cloud.len() < count + prefix.len() {
        let u = draw_ball_point(dim, rng);
        cloud.push(op, &u);
        if cloud.len() < count + prefix.len() {
            let neg: Vec<Complex64> = u.iter().map(|z| -z).collect();
            cloud.push(op, &neg);
        }
    }
    cloud
}

/// Farthest-first traversal: `order[k]` is the `k`-th center and `radii[k]`
/// the covering radius of the first `k + 1` centers.
#[derive(Debug, Clone, PartialEq)]
pub struct Traversal {
    pub order: Vec<usize>,
    pub radii: Vec<f64>,
}

impl Traversal {
    /// Number of centers needed for radius `eps`; `None` if the traversal
    /// stopped before reaching it.
    pub fn count(&self, eps: f64) -> Option<usize> {
        self.radii.iter().position(|r| *r <= eps).map(|k| k + 1)
    }
}

/// Index of the point closest to the centroid of the images (ties: lowest index).
fn nearest_to_centroid(cloud: &Cloud) -> usize {
    let n = cloud.len();
    let w = 2 * cloud.rows;
    let mut centroid = alloc::vec![0.0; w];
    for i in 0..n {
        for (c, v) in centroid.iter_mut().zip(cloud.image(i)) {
            *c += v;
        }
    }
    for c in centroid.iter_mut() {
        *c /= n as f64;
    }
    (0..n)
        .map(|i| (i, sup_dist_sq(cloud.image(i), &centroid)))
        .fold((0, f64::INFINITY), |best, (i, d)| if d < best.1 { (i, d) } else { best })
        .0
}

/// Farthest-first traversal from the given seed centers (or from the point
/// nearest the centroid), stopping once the radius drops to `stop_eps`.
pub fn farthest_first(cloud: &Cloud, seeds: &[usize], stop_eps: f64) -> Traversal {
    let n = cloud.len();
    let mut order = Vec::new();
    let mut radii = Vec::new();
    if n == 0 {
        return Traversal { order, radii };
    }
    let mut min_d = alloc::vec![f64::INFINITY; n];
    let add = |c: usize, min_d: &mut [f64], order: &mut Vec<usize>, radii: &mut Vec<f64>| {
        order.push(c);
        let ci = cloud.image(c);
        let mut worst = (0usize, -1.0f64);
        for (i, m) in min_d.iter_mut().enumerate() {
            let d = sup_dist_sq(cloud.image(i), ci);
            if d < *m {
                *m = d;
            }
            if *m > worst.1 {
                worst = (i, *m);
            }
        }
        radii.push(libm::sqrt(worst.1.max(0.0)));
        worst.0
    };
    let mut next = 0;
    let starts: Vec<usize> = if seeds.is_empty() { alloc::vec![nearest_to_centroid(cloud)] } else { seeds.to_vec() };
    for &s in &starts {
        next = add(s, &mut min_d, &mut order, &mut radii);
    }
    while *radii.last().unwrap() > stop_eps && order.len() < n {
        next = add(next, &mut min_d, &mut order, &mut radii);
    }
    Traversal { order, radii }
}

/// Farthest-first net of the cloud at radius `eps`: `(count, centers)`.
pub fn greedy_cover(cloud: &Cloud, eps: f64) -> (usize, Vec<usize>) {
    let t = farthest_first(cloud, &[], eps);
    let k = t.count(eps).unwrap_or(t.order.len());
    (k, t.order[..k].to_vec())
}

/// Greedy maximal subset with pairwise grid sup-distance `> 2ε`, scanning
/// `preferred` first and then every other index.
pub fn packing_with_order(cloud: &Cloud, eps: f64, preferred: &[usize]) -> Vec<usize> {
    let n = cloud.len();
    let thr = 4.0 * eps * eps;
    let mut taken = alloc::vec![false; n];
    let mut chosen: Vec<usize> = Vec::new();
    let rest = (0..n).filter(|i| !preferred.contains(i));
    for i in preferred.iter().copied().chain(rest) {
        if taken[i] {
            continue;
        }
        taken[i] = true;
        let im = cloud.image(i);
        if chosen.iter().all(|&c| sup_dist_sq(cloud.image(c), im) > thr) {
            chosen.push(i);
        }
    }
    chosen
}

/// Size of a maximal `2ε`-separated subset: a certified lower bound on the
/// `ε`-covering number of the cloud and of the underlying image set.
pub fn packing_lower(cloud: &Cloud, eps: f64) -> usize {
    if cloud.is_empty() {
        return 0;
    }
    let start = (0..cloud.len()).fold(0, |b, i| if cloud.sup_norm(i) > cloud.sup_norm(b) { i } else { b });
    let t = farthest_first(cloud, &[start], 2.0 * eps);
    packing_with_order(cloud, eps, &t.order).len()
}

/// Traversal order with the start point (near the centroid, hence close to
/// everything) moved to the end.
fn packing_order(t: &Traversal) -> Vec<usize> {
    let mut o: Vec<usize> = t.order.iter().skip(1).copied().collect();
    o.extend(t.order.first());
    o
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketStatus {
    Ok,
    Violated,
    /// `ε ≤ δ_{λ_small}`: the bracket is not defined.
    Undefined,
}

impl BracketStatus {
    pub fn name(self) -> &'static str {
        match self {
            BracketStatus::Ok => "true",
            BracketStatus::Violated => "false",
            BracketStatus::Undefined => "undefined",
        }
    }
}

/// Which count a report row carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowRole {
    /// `N̂(ε, λ_small)`
    Small,
    /// `N̂(ε, λ_large)`
    Large,
    /// `N̂(ε − δ, λ_small)`; the row's `eps` is `ε − δ`.
    SmallShifted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoveringRow {
    /// Radius at which this row's counts are taken.
    pub eps: f64,
    /// Nominal radius of the bracket this row belongs to.
    pub bracket_eps: f64,
    pub role: RowRole,
    pub lambda: f64,
    pub n_cover_est: usize,
    pub n_pack_lower: usize,
    /// Volumetric lower bound in the `L²` norm on `F_λ` (negative = vacuous).
    pub ln_vol_lower: Option<f64>,
    pub ln_thm_upper: Option<f64>,
    pub ln_thm_lower: Option<f64>,
    pub bracket: BracketStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoveringReport {
    pub seed: u64,
    pub cloud_size: usize,
    pub lambda_small: f64,
    pub lambda_large: f64,
    /// `δ_{λ_small}`
    pub delta: f64,
    pub slack: f64,
    /// `‖Q_{A_λ}‖` for the small and large truncations.
    pub norm_small: f64,
    pub norm_large: f64,
    /// Grid discretisation allowance for unit-ball images of the large truncation.
    pub grid_tax: f64,
    pub rows: Vec<CoveringRow>,
}

impl CoveringReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.role == RowRole::Small && r.bracket == BracketStatus::Violated).count()
    }

    pub fn undefined(&self) -> usize {
        self.rows.iter().filter(|r| r.role == RowRole::Small && r.bracket == BracketStatus::Undefined).count()
    }
}

/// Settings for [`bracket_covering`].
#[derive(Debug, Clone)]
pub struct BracketConfig<'a> {
    pub grid: &'a QuadratureGrid,
    pub cloud_size: usize,
    pub seed: u64,
    /// Multiplier on the upper side of the bracket.
    pub slack: f64,
    /// Constants for the theorem columns.
    pub params: Option<&'a BoundParameters>,
}

/// Counts for `Q_{A_λsmall}` at `ε` and `ε − δ` and for `Q_{A_λlarge}` at `ε`,
/// checking `N̂(ε, small) ≤ N̂(ε, large) ≤ N̂(ε − δ, small)·slack`.
///
/// The large cloud contains the small cloud (zero-padded) followed by
/// `cloud_size` fresh points; its net starts from the small net at the same
/// radius. Large counts are reported as their nonincreasing envelope in `ε`
/// (padding a net with redundant centers keeps it a net).
pub fn bracket_covering(kernel: &TruncatedKernel, lambda_small: f64, lambda_large: f64, eps_grid: &[f64], cfg: &BracketConfig) -> Result<CoveringReport> {
    if !(lambda_small < lambda_large) && lambda_small != lambda_large {
        return Err(Error::InvalidParameter(format!("λ_small = {lambda_small} must not exceed λ_large = {lambda_large}")));
    }
    if eps_grid.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidParameter("radii must be positive".into()));
    }
    if cfg.cloud_size == 0 {
        return Err(Error::InvalidParameter("cloud size must be positive".into()));
    }
    let small = build_truncated_operator(kernel, lambda_small, cfg.grid)?;
    let large = build_truncated_operator(kernel, lambda_large, cfg.grid)?;
    let delta = tail_delta(kernel.symbol(), lambda_small)?;

    let small_cloud = sample_ball_image(&small, cfg.cloud_size, cfg.seed);
    let pad = large.complex_dim() - small.complex_dim();
    let large_cloud = if pad == 0 {
        small_cloud.clone()
    } else {
        let prefix: Vec<Vec<Complex64>> = (0..small_cloud.len())
            .map(|i| {
                let mut u = small_cloud.coefficients(i).to_vec();
                u.extend(core::iter::repeat_n(Complex64::new(0.0, 0.0), pad));
                u
            })
            .collect();
        let mut rng = stream(cfg.seed, StreamId::BracketCloud);
        sample_with(&large, cfg.cloud_size, &mut rng, &prefix)
    };

    let mut radii: Vec<f64> = eps_grid.to_vec();
    radii.extend(eps_grid.iter().map(|e| e - delta).filter(|r| *r > 0.0));
    let stop = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let t_small = farthest_first(&small_cloud, &[], stop);
    let count_small = |e: f64| t_small.count(e).unwrap_or(t_small.order.len());
    let small_pack_order = packing_order(&t_small);

    // large nets seeded with the small net at the same radius
    let mut sorted: Vec<f64> = eps_grid.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut envelope: Vec<(f64, usize)> = Vec::new();
    let mut running = 0usize;
    for &e in &sorted {
        let k = count_small(e);
        let seeds = &t_small.order[..k];
        let t = farthest_first(&large_cloud, seeds, e);
        let c = t.count(e).unwrap_or(t.order.len()).max(k);
        running = running.max(c);
        envelope.push((e, running));
    }
    let count_large = |e: f64| envelope.iter().find(|(x, _)| *x == e).map(|p| p.1).unwrap_or(0);

    let theorem = |e: f64| -> (Option<f64>, Option<f64>) {
        match cfg.params {
            Some(p) => (
                upper_bound(p, e).ok().flatten(),
                lower_bound(p, e).ok().flatten(),
            ),
            None => (None, None),
        }
    };
    let vol = |lam: f64, e: f64| det_lower_bound(kernel.symbol(), lam, e).ok();

    let mut rows = Vec::new();
    for &e in eps_grid {
        let n_small = count_small(e);
        let n_large = count_large(e);
        let shifted = e - delta;
        let (status, n_shift) = if shifted > 0.0 {
            let ns = count_small(shifted);
            let ok = n_small <= n_large && (n_large as f64) <= ns as f64 * cfg.slack;
            (if ok { BracketStatus::Ok } else { BracketStatus::Violated }, Some(ns))
        } else {
            (BracketStatus::Undefined, None)
        };
        let (tu, tl) = theorem(e);
        rows.push(CoveringRow {
            eps: e,
            bracket_eps: e,
            role: RowRole::Small,
            lambda: lambda_small,
            n_cover_est: n_small,
            n_pack_lower: packing_with_order(&small_cloud, e, &small_pack_order).len(),
            ln_vol_lower: vol(lambda_small, e),
            ln_thm_upper: tu,
            ln_thm_lower: tl,
            bracket: status,
        });
        rows.push(CoveringRow {
            eps: e,
            bracket_eps: e,
            role: RowRole::Large,
            lambda: lambda_large,
            n_cover_est: n_large,
            n_pack_lower: packing_lower(&large_cloud, e),
            ln_vol_lower: vol(lambda_large, e),
            ln_thm_upper: tu,
            ln_thm_lower: tl,
            bracket: status,
        });
        if let Some(ns) = n_shift {
            let (tu, tl) = theorem(shifted);
            rows.push(CoveringRow {
                eps: shifted,
                bracket_eps: e,
                role: RowRole::SmallShifted,
                lambda: lambda_small,
                n_cover_est: ns,
                n_pack_lower: packing_with_order(&small_cloud, shifted, &small_pack_order).len(),
                ln_vol_lower: vol(lambda_small, shifted),
                ln_thm_upper: tu,
                ln_thm_lower: tl,
                bracket: status,
            });
        }
    }
    Ok(CoveringReport {
        seed: cfg.seed,
        cloud_size: cfg.cloud_size,
        lambda_small,
        lambda_large,
        delta,
        slack: cfg.slack,
        norm_small: small.norm_q_a(),
        norm_large: large.norm_q_a(),
        grid_tax: large.grid_tax(1.0),
        rows,
    })
}

/// Direct enumeration helper: the dual labels of `A_λ` a matrix would use.
pub fn truncated_labels(group: GroupId, lambda: f64) -> Result<Vec<IrrepLabel>> {
    enumerate_dual(group, lambda)
}
