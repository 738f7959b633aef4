//! Dual frame pairs and their cross-Gramians.
//!
//! For a dual pair in `ℂᵏ` the matrix `G_{mn} = (y_n, x_m)` is an
//! idempotent of rank `k` whose diagonal lists `(y_n, x_n)`; every
//! idempotent arises this way.

use alloc::format;
use alloc::vec::Vec;

use crate::classify::canonical_decomposition;
use crate::error::{shape, Error, Result};
use crate::linalg::{inverse, ComplexMatrix, C64};

/// `N` vectors `x_n` and `N` vectors `y_n` in `ℂ^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePair {
    pub dim: usize,
    pub x: Vec<Vec<C64>>,
    pub y: Vec<Vec<C64>>,
}

const DUALITY_TOL: f64 = 1e-9;

fn synthesis(dim: usize, v: &[Vec<C64>]) -> Result<ComplexMatrix> {
    if let Some(bad) = v.iter().find(|c| c.len() != dim) {
        return Err(shape(format!("frame vector of length {} in dimension {dim}", bad.len())));
    }
    ComplexMatrix::from_columns(dim, v)
}

impl FramePair {
    pub fn new(dim: usize, x: Vec<Vec<C64>>, y: Vec<Vec<C64>>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(shape(format!("{} analysis vectors vs {} synthesis vectors", x.len(), y.len())));
        }
        synthesis(dim, &x)?;
        synthesis(dim, &y)?;
        Ok(FramePair { dim, x, y })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `‖Y X* − I‖_max`, i.e. how far `Σ (v, x_n) y_n` is from `v`.
    pub fn duality_residual(&self) -> Result<f64> {
        let x = synthesis(self.dim, &self.x)?;
        let y = synthesis(self.dim, &self.y)?;
        Ok(y.matmul(&x.adjoint())?.sub(&ComplexMatrix::identity(self.dim))?.max_abs())
    }

    /// `(y_n, x_n)` for every `n`.
    pub fn inner_products(&self) -> Vec<C64> {
        self.x
            .iter()
            .zip(&self.y)
            .map(|(x, y)| y.iter().zip(x).map(|(a, b)| a * b.conj()).sum())
            .collect()
    }
}

/// `G = X* Y`, so `G_{mn} = (y_n, x_m)`.
pub fn cross_gramian(p: &FramePair) -> Result<ComplexMatrix> {
    let residual = p.duality_residual()?;
    if residual > DUALITY_TOL {
        return Err(Error::Precondition { what: "frames are not dual".into(), residual });
    }
    let x = synthesis(p.dim, &p.x)?;
    let y = synthesis(p.dim, &p.y)?;
    x.adjoint().matmul(&y)
}

/// Dual pair whose cross-Gramian is `D`. The canonical form gives
/// `D = A·S` with `A = W₁ + W₂T` and `S = W₁*`; `S·A = I` because `W₁` is
/// orthonormal and orthogonal to `W₂`. `x_m` is the conjugated row `m` of
/// `A`, `y_n` column `n` of `S`.
pub fn extract_frames(d: &ComplexMatrix) -> Result<FramePair> {
    let dec = canonical_decomposition(d)?;
    let n = d.rows();
    let r = dec.coker_dim;
    let v = dec.split.matrix();
    let a = ComplexMatrix::from_fn(n, r, |i, j| {
        let mut acc = v[(i, j)];
        for k in 0..dec.ker_dim {
            acc += v[(i, r + k)] * dec.t[(k, j)];
        }
        acc
    });
    let x = (0..n).map(|m| a.row(m).iter().map(|z| z.conj()).collect()).collect();
    let y = (0..n).map(|m| v.row(m)[..r].iter().map(|z| z.conj()).collect()).collect();
    Ok(FramePair { dim: r, x, y })
}

/// `y_n = F⁻¹ x_n` with frame operator `F = Σ x_n x_n*`.
pub fn canonical_dual(dim: usize, x: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
    let xm = synthesis(dim, x)?;
    let f = xm.matmul(&xm.adjoint())?;
    let finv = inverse(&f).map_err(|_| Error::Domain("vectors do not span the space".into()))?;
    let y = finv.matmul(&xm)?;
    Ok(y.columns())
}

