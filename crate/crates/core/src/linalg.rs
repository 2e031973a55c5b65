//! Small dense linear algebra on row-major `f64` slices.
//!
//! Everything here works on matrices with a handful of rows; nothing is
//! blocked or vectorised.

use alloc::vec;
use alloc::vec::Vec;

/// Relative squared-norm threshold below which a residual row is treated as
/// lying in the span of the rows already accepted.
pub(crate) const RANK_TOL: f64 = 1e-24;

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal basis of a row span, rows stored back to back.
#[derive(Debug, Clone, Default)]
pub(crate) struct Basis {
    dim: usize,
    data: Vec<f64>,
}

impl Basis {
    pub(crate) fn empty(dim: usize) -> Self {
        Basis {
            dim,
            data: Vec::new(),
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub(crate) fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1))
    }

    /// Removes the component of `v` lying in this span (two passes of
    /// modified Gram-Schmidt).
    pub(crate) fn reject(&self, v: &mut [f64]) {
        reject_rows(&self.data, self.dim, v);
    }

    /// Extends the basis with `v` if it is not already (numerically) in the
    /// span. Returns whether the rank grew.
    pub(crate) fn push(&mut self, v: &[f64]) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        let norm0 = dot(v, v);
        if norm0 == 0.0 {
            return false;
        }
        let start = self.data.len();
        self.data.extend_from_slice(v);
        let (head, r) = self.data.split_at_mut(start);
        reject_rows(head, self.dim, r);
        let norm = dot(&self.data[start..], &self.data[start..]);
        if norm <= RANK_TOL * norm0 {
            self.data.truncate(start);
            return false;
        }
        let inv = 1.0 / libm::sqrt(norm);
        self.data[start..].iter_mut().for_each(|x| *x *= inv);
        true
    }

    /// Basis of the span of `rows` after projecting out `against`.
    pub(crate) fn residual_span<'a>(
        dim: usize,
        rows: impl IntoIterator<Item = &'a [f64]>,
        against: &Basis,
    ) -> Basis {
        let mut out = Basis::empty(dim);
        let mut r = vec![0.0; dim];
        for row in rows {
            r.copy_from_slice(row);
            let n0 = dot(&r, &r);
            if n0 == 0.0 {
                continue;
            }
            against.reject(&mut r);
            // Rows that vanish after conditioning carry no information.
            if dot(&r, &r) <= RANK_TOL * n0 {
                continue;
            }
            out.push(&r);
        }
        out
    }
}
fn reject_rows(rows: &[f64], dim: usize, v: &mut [f64]) {
    if dim == 0 {
        return;
    }
    for _ in 0..2 {
        for q in rows.chunks_exact(dim) {
            let c = dot(q, v);
            for (x, qi) in v.iter_mut().zip(q) {
                *x -= c * qi;
            }
        }
    }
}

/// Natural-log determinant of a symmetric positive-definite matrix via
/// Cholesky. Returns `None` when a pivot is not strictly positive.
pub(crate) fn ln_det_spd(a: &[f64], n: usize) -> Option<f64> {
    let mut l = a.to_vec();
    let mut acc = 0.0;
    for j in 0..n {
        let mut d = l[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if d.is_nan() || d <= 0.0 {
            return None;
        }
        let dj = libm::sqrt(d);
        l[j * n + j] = dj;
        acc += libm::log(d);
        for i in j + 1..n {
            let mut s = l[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / dj;
        }
    }
    Some(acc)
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and the eigenvectors as columns of a row-major matrix.
pub(crate) fn sym_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[i * n + j] * m[i * n + j];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| m[i * n + i]).collect(), v)
}

/// Principal square root of a symmetric positive semi-definite 2x2 matrix.
pub(crate) fn sqrt_psd2(a: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let (w, v) = sym_eigen(&[a[0][0], a[0][1], a[1][0], a[1][1]], 2);
    let s = [libm::sqrt(w[0].max(0.0)), libm::sqrt(w[1].max(0.0))];
    let mut out = [[0.0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = v[i * 2] * s[0] * v[j * 2] + v[i * 2 + 1] * s[1] * v[j * 2 + 1];
        }
    }
    out
}
