use alloc::format;
use alloc::vec::Vec;

use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{shape, Error, Result};
use crate::tol;

/// Orthonormal family stored as the columns of a `dim × k` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    columns: ComplexMatrix,
}

impl OrthonormalBasis {
    /// Checks `columns* · columns = I` against the default unitary tolerance.
    pub fn new(columns: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(columns, tol::UNITARY)
    }

    pub fn with_tolerance(columns: ComplexMatrix, tol: f64) -> Result<Self> {
        if columns.cols() > columns.rows() {
            return Err(shape(format!(
                "{} vectors cannot be orthonormal in dimension {}",
                columns.cols(),
                columns.rows()
            )));
        }
        let residual = gram_residual(&columns);
        if residual > tol {
            return Err(Error::Precondition {
                what: "columns are not orthonormal".into(),
                residual,
            });
        }
        Ok(OrthonormalBasis { columns })
    }

    pub fn from_vectors(dim: usize, vectors: &[Vec<C64>]) -> Result<Self> {
        Self::new(ComplexMatrix::from_columns(dim, vectors)?)
    }

    pub(crate) fn from_columns_unchecked(columns: ComplexMatrix) -> Self {
        OrthonormalBasis { columns }
    }

    pub fn standard(dim: usize) -> Self {
        OrthonormalBasis {
            columns: ComplexMatrix::identity(dim),
        }
    }

    /// Standard vectors `e_i` for the listed indices, in that order.
    pub fn standard_subset(dim: usize, idx: &[usize]) -> Result<Self> {
        let mut m = ComplexMatrix::zeros(dim, idx.len());
        for (j, &i) in idx.iter().enumerate() {
            if i >= dim {
                return Err(shape(format!("index {i} out of range 0..{dim}")));
            }
            m[(i, j)] = ONE;
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.columns.rows()
    }

    pub fn len(&self) -> usize {
        self.columns.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.cols() == 0
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.columns
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.columns
    }

    pub fn vector(&self, j: usize) -> Vec<C64> {
        self.columns.column(j)
    }

    pub fn vectors(&self) -> Vec<Vec<C64>> {
        self.columns.columns()
    }

    pub fn select(&self, idx: &[usize]) -> Result<Self> {
        Ok(OrthonormalBasis {
            columns: self.columns.select_columns(idx)?,
        })
    }

    /// `‖B*B − I‖_max`.
    pub fn unitarity_residual(&self) -> f64 {
        gram_residual(&self.columns)
    }

    /// Maps coordinates relative to `self` into ambient coordinates.
    pub fn embed(&self, inner: &OrthonormalBasis) -> Result<Self> {
        if inner.dim() != self.len() {
            return Err(shape(format!(
                "inner basis lives in dimension {}, outer family has {} vectors",
                inner.dim(),
                self.len()
            )));
        }
        Ok(OrthonormalBasis {
            columns: self.columns.matmul(&inner.columns)?,
        })
    }
}

/// `‖A*A − I‖_max`, accumulated row by row over nonzero entries.
pub(crate) fn gram_residual(a: &ComplexMatrix) -> f64 {
    let k = a.cols();
    let mut gram = alloc::vec![ZERO; k * k];
    let mut nz: Vec<(usize, C64)> = Vec::new();
    for i in 0..a.rows() {
        nz.clear();
        nz.extend(
            a.row(i)
                .iter()
                .enumerate()
                .filter(|(_, z)| **z != ZERO)
                .map(|(j, z)| (j, *z)),
        );
        for &(p, x) in &nz {
            let xc = x.conj();
            for &(q, y) in &nz {
                gram[p * k + q] += xc * y;
            }
        }
    }
    let mut worst: f64 = 0.0;
    for p in 0..k {
        for q in 0..k {
            let target = if p == q { ONE } else { ZERO };
            worst = worst.max((gram[p * k + q] - target).norm());
        }
    }
    worst
}
