use alloc::format;
use alloc::vec::Vec;

use super::basis::OrthonormalBasis;
use super::jacobi::svd;
use super::matrix::{vector_norm, ComplexMatrix, C64};
use crate::error::{shape, Result};
use crate::{math, tol};

/// `⟨(M bⱼ, bⱼ)⟩` for the columns of `basis`.
pub fn diagonal_of(m: &ComplexMatrix, basis: &OrthonormalBasis) -> Result<Vec<C64>> {
    if !m.is_square() || m.rows() != basis.dim() {
        return Err(shape(format!(
            "{}x{} operator against a basis in dimension {}",
            m.rows(),
            m.cols(),
            basis.dim()
        )));
    }
    let sparse = m.sparse();
    Ok((0..basis.len())
        .map(|j| sparse.quadratic_form(&basis.vector(j)))
        .collect())
}

/// Largest singular value.
///
/// Power iteration on `M*M` (closed form for 2×2). If the iteration has not
/// settled after its budget, small matrices fall back to a Jacobi SVD.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 || m.max_abs() == 0.0 {
        return 0.0;
    }
    if m.rows() == 2 && m.cols() == 2 {
        return norm_2x2(m);
    }
    let sparse = m.sparse();
    let n = m.cols();
    let mut v: Vec<C64> = (0..n)
        .map(|j| C64::new(1.0 + 0.125 * (j % 7) as f64, 0.0625 * (j % 5) as f64))
        .collect();
    let nv = vector_norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut sigma2: f64 = 0.0;
    for _ in 0..tol::POWER_MAX_ITER {
        let y = sparse.mul_vec(&v);
        let w = sparse.adjoint_mul_vec(&y);
        let ny = vector_norm(&y);
        let estimate = ny * ny;
        let nw = vector_norm(&w);
        if nw == 0.0 {
            // Start vector landed in the kernel; nudge along the first
            // nonzero column.
            let k = first_nonzero_col(m);
            v = (0..n)
                .map(|j| C64::new(if j == k { 1.0 } else { 0.0 }, 0.0))
                .collect();
            continue;
        }
        let settled = math::abs(estimate - sigma2) <= tol::POWER_TOL * estimate;
        sigma2 = estimate;
        v = w.into_iter().map(|x| x / nw).collect();
        if settled {
            return math::sqrt(sigma2);
        }
    }
    if n <= 300 && m.rows() <= 300 {
        return svd(m).singular_values[0];
    }
    math::sqrt(sigma2)
}

fn first_nonzero_col(m: &ComplexMatrix) -> usize {
    (0..m.cols())
        .find(|&j| (0..m.rows()).any(|i| m[(i, j)].norm() > 0.0))
        .unwrap_or(0)
}

fn norm_2x2(m: &ComplexMatrix) -> f64 {
    let f2: f64 = m.data().iter().map(|z| z.norm_sqr()).sum();
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).norm();
    let disc = (f2 * f2 - 4.0 * det * det).max(0.0);
    math::sqrt((f2 + math::sqrt(disc)) / 2.0)
}

/// `‖M² − M‖₂`.
pub fn idempotency_residual(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(shape("idempotency needs a square matrix"));
    }
    Ok(operator_norm(&m.matmul(m)?.sub(m)?))
}

/// `B* M B` for a full basis.
pub fn change_of_basis(m: &ComplexMatrix, basis: &OrthonormalBasis) -> Result<ComplexMatrix> {
    if !basis.is_full() {
        return Err(shape(format!(
            "change of basis needs a square basis, got {} vectors in dimension {}",
            basis.len(),
            basis.dim()
        )));
    }
    compress(m, basis)
}

/// `B* M B` for any orthonormal family.
pub fn compress(m: &ComplexMatrix, basis: &OrthonormalBasis) -> Result<ComplexMatrix> {
    if !m.is_square() || m.rows() != basis.dim() {
        return Err(shape(format!(
            "{}x{} operator against a basis in dimension {}",
            m.rows(),
            m.cols(),
            basis.dim()
        )));
    }
    let b = basis.matrix();
    b.adjoint().matmul(&m.matmul(b)?)
}

/// Number of singular values above `tol · ‖M‖`.
pub fn numerical_rank(m: &ComplexMatrix, tol: f64) -> usize {
    let s = svd(m).singular_values;
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > tol * top).count()
}

/// `‖P_A − P_B‖_max` for the orthogonal projections onto two families.
pub fn projection_distance(a: &OrthonormalBasis, b: &OrthonormalBasis) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(shape("families live in different dimensions"));
    }
    let pa = a.matrix().matmul(&a.matrix().adjoint())?;
    let pb = b.matrix().matmul(&b.matrix().adjoint())?;
    Ok(pa.sub(&pb)?.max_abs())
}
