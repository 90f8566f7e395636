//! Exact minimal covers of tiny images: segments `[−h, h]` and planar
//! ellipses (discs included) by Euclidean `ε`-balls.
//!
//! Segments are solved in closed form. For ellipses the count is bracketed:
//! the lower end is the exact minimum cover of a finite subset of the
//! ellipse (any cover of the ellipse covers the subset), the upper end is a
//! cover of a fine mesh at the shrunken radius `ε − ρ`, `ρ` being the
//! mesh's covering radius, which therefore covers the whole ellipse.

use alloc::vec::Vec;

use crate::covering::TruncatedOperatorMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanarSet {
    /// `[−h, h] ⊂ ℝ`.
    Segment { h: f64 },
    /// `{(x, y) : (x/h1)² + (y/h2)² ≤ 1}`; a disc when `h1 = h2`.
    Ellipse { h1: f64, h2: f64 },
}

impl PlanarSet {
    pub fn disc(h: f64) -> Self {
        PlanarSet::Ellipse { h1: h, h2: h }
    }

    pub fn real_dim(&self) -> usize {
        match self {
            PlanarSet::Segment { .. } => 1,
            PlanarSet::Ellipse { .. } => 2,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            PlanarSet::Segment { h } => h > 0.0 && h.is_finite(),
            PlanarSet::Ellipse { h1, h2 } => h1 > 0.0 && h2 > 0.0 && h1.is_finite() && h2.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("semi-axes must be positive and finite".into()))
        }
    }
}

/// Image of the unit ball under an operator with one complex coefficient:
/// `{u v : |u| ≤ 1}`, isometric in the sup norm to a disc of radius `‖v‖_∞`.
pub fn planar_image(op: &TruncatedOperatorMatrix) -> Result<PlanarSet> {
    if op.real_columns() > 2 {
        return Err(Error::TooManyDimensions(op.real_columns()));
    }
    Ok(PlanarSet::disc(op.max_row_norm()))
}

/// Bracket on the minimal cover count; `lower == upper` means exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCount {
    pub lower: usize,
    pub upper: usize,
}

impl OracleCount {
    pub fn exact(&self) -> Option<usize> {
        (self.lower == self.upper).then_some(self.lower)
    }
}

/// Node budget of the exact set-cover search before it settles for the
/// largest size it has ruled out.
const SEARCH_BUDGET: usize = 2_000_000;

pub fn brute_cover_oracle(set: &PlanarSet, eps: f64) -> Result<OracleCount> {
    set.validate()?;
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("ε must be positive".into()));
    }
    match *set {
        PlanarSet::Segment { h } => {
            // intervals of length 2ε tile [−h, h] optimally
            let ratio = h / eps;
            let near = libm::round(ratio);
            let n = if (ratio - near).abs() <= 1e-12 * ratio.max(1.0) { near } else { libm::ceil(ratio) };
            let n = (n as usize).max(1);
            Ok(OracleCount { lower: n, upper: n })
        }
        PlanarSet::Ellipse { h1, h2 } => {
            if eps >= h1.max(h2) {
                return Ok(OracleCount { lower: 1, upper: 1 });
            }
            let upper = mesh_upper(h1, h2, eps);
            let lower = mesh_lower(h1, h2, eps, upper);
            Ok(OracleCount { lower, upper })
        }
    }
}

/// `ln` of the real-dimension volume ratio `vol(K)/vol(εB)`.
pub fn volumetric_ln_bound(set: &PlanarSet, eps: f64) -> f64 {
    match *set {
        PlanarSet::Segment { h } => libm::log(h / eps),
        PlanarSet::Ellipse { h1, h2 } => libm::log(h1 * h2 / (eps * eps)),
    }
}

/// Polar mesh of the ellipse with `rings` rings; covering radius `≤ max(h)/rings`.
fn ellipse_mesh(h1: f64, h2: f64, rings: usize) -> Vec<[f64; 2]> {
    let mut pts = alloc::vec![[0.0, 0.0]];
    for i in 1..=rings {
        let r = i as f64 / rings as f64;
        let n = libm::ceil(2.0 * core::f64::consts::PI * i as f64) as usize;
        for j in 0..n {
            let t = 2.0 * core::f64::consts::PI * j as f64 / n as f64;
            pts.push([h1 * r * libm::cos(t), h2 * r * libm::sin(t)]);
        }
    }
    pts
}

fn dist_sq(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1])
}

type Bits = Vec<u64>;

fn bits_for(n: usize) -> Bits {
    alloc::vec![0; n.div_ceil(64)]
}

fn set_bit(b: &mut Bits, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn popcount(b: &[u64]) -> u32 {
    b.iter().map(|w| w.count_ones()).sum()
}

fn and_count(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

fn covers(center: [f64; 2], pts: &[[f64; 2]], r: f64) -> Bits {
    let mut b = bits_for(pts.len());
    let r2 = r * r;
    for (i, p) in pts.iter().enumerate() {
        if dist_sq(center, *p) <= r2 {
            set_bit(&mut b, i);
        }
    }
    b
}

/// Greedy cover of a fine mesh at radius `ε − ρ` using lattice centers.
fn mesh_upper(h1: f64, h2: f64, eps: f64) -> usize {
    let hmax = h1.max(h2);
    let rings = libm::ceil(8.0 * hmax / eps) as usize;
    let rho = hmax / rings as f64;
    let r = (eps - rho) * (1.0 - 1e-12);
    let pts = ellipse_mesh(h1, h2, rings);
    let step = eps / 4.0;
    let nx = libm::ceil(h1 / step) as i64;
    let ny = libm::ceil(h2 / step) as i64;
    let mut cands: Vec<Bits> = Vec::new();
    for ix in -nx..=nx {
        for iy in -ny..=ny {
            let c = [ix as f64 * step, iy as f64 * step];
            let b = covers(c, &pts, r);
            if popcount(&b) > 0 {
                cands.push(b);
            }
        }
    }
    let mut uncovered = bits_for(pts.len());
    for i in 0..pts.len() {
        set_bit(&mut uncovered, i);
    }
    let mut count = 0;
    while popcount(&uncovered) > 0 {
        let best = cands.iter().max_by_key(|c| and_count(c, &uncovered)).expect("mesh points have candidates");
        for (u, c) in uncovered.iter_mut().zip(best) {
            *u &= !c;
        }
        count += 1;
    }
    count
}

/// Exact minimum cover of a coarse subset; candidate centers are the subset
/// points and the pairwise intersections of `ε`-circles, which contain an
/// optimal solution. Coverage is tested at a slightly enlarged radius, which
/// can only lower the count.
fn mesh_lower(h1: f64, h2: f64, eps: f64, upper: usize) -> usize {
    let hmax = h1.max(h2);
    let mut rings = 1;
    while rings < 8 && ellipse_mesh(h1, h2, rings + 1).len() <= 128 && (hmax / rings as f64) > eps / 4.0 {
        rings += 1;
    }
    let pts = ellipse_mesh(h1, h2, rings);
    let r = eps * (1.0 + 1e-9);
    let mut centers: Vec<[f64; 2]> = pts.clone();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d2 = dist_sq(pts[i], pts[j]);
            if d2 > 4.0 * eps * eps || d2 == 0.0 {
                continue;
            }
            let m = [(pts[i][0] + pts[j][0]) / 2.0, (pts[i][1] + pts[j][1]) / 2.0];
            let h = libm::sqrt((eps * eps - d2 / 4.0).max(0.0));
            let d = libm::sqrt(d2);
            let perp = [-(pts[j][1] - pts[i][1]) / d, (pts[j][0] - pts[i][0]) / d];
            centers.push([m[0] + h * perp[0], m[1] + h * perp[1]]);
            centers.push([m[0] - h * perp[0], m[1] - h * perp[1]]);
        }
    }
    let mut sets: Vec<Bits> = centers.iter().map(|c| covers(*c, &pts, r)).collect();
    sets.sort();
    sets.dedup();
    // drop sets contained in another
    sets.sort_by_key(|s| core::cmp::Reverse(popcount(s)));
    let mut kept: Vec<Bits> = Vec::new();
    for s in sets {
        if !kept.iter().any(|k| s.iter().zip(k).all(|(a, b)| a & !b == 0)) {
            kept.push(s);
        }
    }
    let mut all = bits_for(pts.len());
    for i in 0..pts.len() {
        set_bit(&mut all, i);
    }
    let mut budget = SEARCH_BUDGET;
    let mut k = 1;
    while k < upper {
        match feasible(&kept, &all, k, &mut budget) {
            Some(true) => return k,
            Some(false) => k += 1,
            None => return k,
        }
    }
    upper
}

/// Whether `k` sets cover `uncovered`; `None` once the budget runs out.
fn feasible(sets: &[Bits], uncovered: &Bits, k: usize, budget: &mut usize) -> Option<bool> {
    let left = popcount(uncovered);
    if left == 0 {
        return Some(true);
    }
    if k == 0 {
        return Some(false);
    }
    if *budget == 0 {
        return None;
    }
    *budget -= 1;
    let mut gains: Vec<u32> = sets.iter().map(|s| and_count(s, uncovered)).collect();
    gains.sort_unstable_by(|a, b| b.cmp(a));
    if gains.iter().take(k).sum::<u32>() < left {
        return Some(false);
    }
    // branch on the uncovered element with the fewest covering sets
    let mut best: Option<(usize, usize)> = None;
    for (w, word) in uncovered.iter().enumerate() {
        let mut bits = *word;
        while bits != 0 {
            let i = w * 64 + bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let c = sets.iter().filter(|s| s[i / 64] >> (i % 64) & 1 == 1).count();
            if best.is_none_or(|(_, bc)| c < bc) {
                best = Some((i, c));
            }
        }
    }
    let (e, _) = best?;
    for s in sets.iter().filter(|s| s[e / 64] >> (e % 64) & 1 == 1) {
        let next: Bits = uncovered.iter().zip(s).map(|(u, c)| u & !c).collect();
        match feasible(sets, &next, k - 1, budget) {
            Some(true) => return Some(true),
            Some(false) => {}
            None => return None,
        }
    }
    Some(false)
}
