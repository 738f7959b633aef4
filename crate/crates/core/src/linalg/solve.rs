use alloc::format;


use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{shape, Error, Result};

/// Solves `A X = B` by LU with partial pivoting.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() || a.rows() != b.rows() {
        return Err(shape(format!(
            "cannot solve a {}x{} system against {} rows",
            a.rows(),
            a.cols(),
            b.rows()
        )));
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut x = b.clone();
    let scale = a.max_abs();
    for k in 0..n {
        let (piv, best) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold((k, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
        if best <= 1e-14 * scale || best == 0.0 {
            return Err(Error::Domain("matrix is numerically singular".into()));
        }
        if piv != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            for j in 0..x.cols() {
                let t = x[(k, j)];
                x[(k, j)] = x[(piv, j)];
                x[(piv, j)] = t;
            }
        }
        let inv = lu[(k, k)].inv();
        for i in k + 1..n {
            let f = lu[(i, k)] * inv;
            if f == ZERO {
                continue;
            }
            for j in k..n {
                let t = lu[(k, j)];
                lu[(i, j)] -= f * t;
            }
            for j in 0..x.cols() {
                let t = x[(k, j)];
                x[(i, j)] -= f * t;
            }
        }
    }
    for k in (0..n).rev() {
        let inv = lu[(k, k)].inv();
        for j in 0..x.cols() {
            let mut s = x[(k, j)];
            for i in k + 1..n {
                s -= lu[(k, i)] * x[(i, j)];
            }
            x[(k, j)] = s * inv;
        }
    }
    Ok(x)
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve(a, &ComplexMatrix::identity(a.rows()))
}

/// `‖A‖₂ · ‖A⁻¹‖₂`.
pub fn condition_number(a: &ComplexMatrix) -> Result<f64> {
    let s = super::jacobi::svd(a).singular_values;
    let hi = s.first().copied().unwrap_or(0.0);
    let lo = s.last().copied().unwrap_or(0.0);
    if lo == 0.0 {
        return Err(Error::Domain("matrix is singular".into()));
    }
    Ok(hi / lo)
}
