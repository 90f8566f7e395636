//! Wigner D-matrices of SU(2) from Cayley–Klein parameters.
//!
//! For `U = [[a, −b̄], [b, ā]]` and twice-spin `J`, rows and columns are
//! indexed by `i = 0..=J` with magnetic number `m = J/2 − i`, so row 0 is the
//! highest weight. The entries are the polynomial form of the explicit
//! factorial sum
//!
//! ```text
//! D_{m'm}(U) = Σ_s (−1)^{m'−m+s} √((j+m')!(j−m')!(j+m)!(j−m)!)
//!              / ((j+m−s)! s! (m'−m+s)! (j−m'−s)!)
//!              · a^{j+m−s} ā^{j−m'−s} b^s b̄^{m'−m+s}
//! ```
//!
//! which equals `e^{−im'α} d_{m'm}(β) e^{−imγ}` when `U` has z-y-z Euler
//! angles `(α, β, γ)`. Working from `(a, b)` avoids Euler-angle
//! singularities and makes the homomorphism property exact in exact
//! arithmetic.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::CMatrix;

/// `ln n!` for `n` up to the requested bound.
pub(crate) struct LogFactorials(Vec<f64>);

impl LogFactorials {
    pub(crate) fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        table.push(0.0);
        let mut acc = 0.0;
        for k in 1..=max {
            acc += libm::log(k as f64);
            table.push(acc);
        }
        Self(table)
    }

    #[inline]
    pub(crate) fn get(&self, n: usize) -> f64 {
        self.0[n]
    }
}

fn powers(z: Complex64, max: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut p = Complex64::new(1.0, 0.0);
    out.push(p);
    for _ in 0..max {
        p *= z;
        out.push(p);
    }
    out
}

/// Spin-`J/2` representation matrix of the element `(a, b)`.
pub(crate) fn wigner_d(twice_spin: u32, a: Complex64, b: Complex64) -> CMatrix {
    let jj = twice_spin as usize;
    let dim = jj + 1;
    let lf = LogFactorials::new(jj + 1);
    let pa = powers(a, jj);
    let pac = powers(a.conj(), jj);
    let pb = powers(b, jj);
    let pbc = powers(b.conj(), jj);

    let mut out = CMatrix::zeros(dim, dim);
    for row in 0..dim {
        // j + m' = J − row, j − m' = row
        let jp_row = jj - row;
        let jm_row = row;
        for col in 0..dim {
            let jp_col = jj - col;
            let jm_col = col;
            // m' − m = col − row
            let diff = col as i64 - row as i64;
            let s_min = (-diff).max(0) as usize;
            let s_max = jp_col.min(jm_row);
            if s_min > s_max {
                continue;
            }
            let half_norm = 0.5 * (lf.get(jp_row) + lf.get(jm_row) + lf.get(jp_col) + lf.get(jm_col));
            let mut acc = Complex64::new(0.0, 0.0);
            for s in s_min..=s_max {
                let t = (diff + s as i64) as usize;
                let log_coeff = half_norm - lf.get(jp_col - s) - lf.get(s) - lf.get(t) - lf.get(jm_row - s);
                let mut coeff = libm::exp(log_coeff);
                if t % 2 == 1 {
                    coeff = -coeff;
                }
                acc += pa[jp_col - s] * pac[jm_row - s] * pb[s] * pbc[t] * coeff;
            }
            out[(row, col)] = acc;
        }
    }
    out
}

/// Character `Tr D^J(U)` from the rotation half-angle, via the Chebyshev
/// recurrence `U_{J+1}(c) = 2c U_J(c) − U_{J−1}(c)` with `c = Re a`.
pub(crate) fn character(twice_spin: u32, a: Complex64) -> f64 {
    let c = a.re;
    let (mut prev, mut cur) = (1.0, 2.0 * c);
    if twice_spin == 0 {
        return prev;
    }
    for _ in 1..twice_spin {
        let next = 2.0 * c * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}
