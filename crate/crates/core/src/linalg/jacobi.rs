//! Cyclic Jacobi solvers: two-sided for Hermitian eigenproblems, one-sided
//! (Hestenes) for singular values.

use alloc::vec::Vec;

use super::matrix::{inner, ComplexMatrix, C64};
use crate::error::{shape, Result};
use crate::math;

const MAX_SWEEPS: usize = 100;

/// Unitary `J` on a coordinate pair with `J* G J` diagonal, where
/// `G = [[a, g], [conj g, b]]` is Hermitian. Entries are
/// `[[j_pp, j_pq], [j_qp, j_qq]]`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PairRotation {
    pub pp: C64,
    pub pq: C64,
    pub qp: C64,
    pub qq: C64,
}

impl PairRotation {
    pub(crate) fn diagonalizing(a: f64, b: f64, g: C64) -> Self {
        let r = g.norm();
        if r == 0.0 {
            return PairRotation {
                pp: C64::new(1.0, 0.0),
                pq: C64::new(0.0, 0.0),
                qp: C64::new(0.0, 0.0),
                qq: C64::new(1.0, 0.0),
            };
        }
        let w = (g / r).conj();
        let tau = (b - a) / (2.0 * r);
        let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
        let t = sign / (math::abs(tau) + math::sqrt(1.0 + tau * tau));
        let c = 1.0 / math::sqrt(1.0 + t * t);
        let s = t * c;
        PairRotation {
            pp: C64::new(c, 0.0),
            pq: C64::new(s, 0.0),
            qp: w * (-s),
            qq: w * c,
        }
    }

    /// Right-multiplies columns `p`, `q` of `m` by the rotation.
    pub(crate) fn apply_right(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        for k in 0..m.rows() {
            let x = m[(k, p)];
            let y = m[(k, q)];
            m[(k, p)] = x * self.pp + y * self.qp;
            m[(k, q)] = x * self.pq + y * self.qq;
        }
    }

    /// Left-multiplies rows `p`, `q` of `m` by the adjoint rotation.
    pub(crate) fn apply_left_adjoint(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        for k in 0..m.cols() {
            let x = m[(p, k)];
            let y = m[(q, k)];
            m[(p, k)] = self.pp.conj() * x + self.qp.conj() * y;
            m[(q, k)] = self.pq.conj() * x + self.qq.conj() * y;
        }
    }
}

/// Eigenvalues (ascending) and unitary eigenvector matrix of a Hermitian
/// matrix. Only the upper triangle's Hermitian part is trusted.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !a.is_square() {
        return Err(shape("eigenproblem needs a square matrix"));
    }
    let n = a.rows();
    // Symmetrize so tiny non-Hermitian noise cannot stall convergence.
    let mut m = ComplexMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();
    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let mut off = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    off += m[(p, q)].norm_sqr();
                }
            }
            if math::sqrt(off) <= 1e-17 * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let g = m[(p, q)];
                    if g.norm() <= 1e-300 {
                        continue;
                    }
                    let rot = PairRotation::diagonalizing(m[(p, p)].re, m[(q, q)].re, g);
                    rot.apply_right(&mut m, p, q);
                    rot.apply_left_adjoint(&mut m, p, q);
                    m[(p, q)] = C64::new(0.0, 0.0);
                    m[(q, p)] = C64::new(0.0, 0.0);
                    m[(p, p)].im = 0.0;
                    m[(q, q)].im = 0.0;
                    rot.apply_right(&mut v, p, q);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = v.select_columns(&order)?;
    Ok((values, vectors))
}

/// Thin singular value decomposition `M = U Σ V*` with `V` square.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Descending.
    pub singular_values: Vec<f64>,
    /// `rows × cols`; columns belonging to zero singular values are zero.
    pub left: ComplexMatrix,
    /// `cols × cols`, unitary.
    pub right: ComplexMatrix,
}

/// One-sided Jacobi SVD. Works on columns directly, so tiny singular values
/// keep their absolute accuracy instead of being squared away.
pub fn svd(a: &ComplexMatrix) -> Svd {
    let n = a.cols();
    let mut u = a.clone();
    let mut v = ComplexMatrix::identity(n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let cp = u.column(p);
                let cq = u.column(q);
                let alpha: f64 = cp.iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cq.iter().map(|z| z.norm_sqr()).sum();
                // Gram entry (p, q) = u_p* u_q.
                let g = inner(&cq, &cp);
                if g.norm() <= 1e-15 * math::sqrt(alpha * beta) || g.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let rot = PairRotation::diagonalizing(alpha, beta, g);
                rot.apply_right(&mut u, p, q);
                rot.apply_right(&mut v, p, q);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n)
        .map(|j| math::sqrt((0..u.rows()).map(|i| u[(i, j)].norm_sqr()).sum()))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let mut left = ComplexMatrix::zeros(u.rows(), n);
    for (k, &j) in order.iter().enumerate() {
        if norms[j] > 0.0 {
            for i in 0..u.rows() {
                left[(i, k)] = u[(i, j)] / norms[j];
            }
        }
    }
    let right = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Svd {
        singular_values,
        left,
        right,
    }
}
