use alloc::vec::Vec;

use super::basis::OrthonormalBasis;
use super::matrix::{ComplexMatrix, C64};
use super::norms::{diagonal_of, idempotency_residual, operator_norm};
use crate::error::Result;
use crate::tol::Tolerances;

/// Residuals attached to every construction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Certificate {
    /// `‖D² − D‖₂`.
    pub idempotency_residual: f64,
    /// `‖B*B − I‖_max`.
    pub unitarity_residual: f64,
    /// Max deviation of the realized diagonal from the target on the
    /// processed prefix.
    pub diagonal_residual: f64,
    pub norm_bound_claimed: Option<f64>,
    pub norm_observed: f64,
    /// Condition number of a similarity used along the way, when it was
    /// close to degenerate.
    pub similarity_condition: Option<f64>,
}

impl Certificate {
    /// Scaled acceptance test: idempotency against `1 + ‖D‖²`, diagonal
    /// against `1 + ‖D‖`, norm against the claimed bound.
    pub fn passes(&self, tol: &Tolerances) -> bool {
        let n = self.norm_observed;
        let finite = [
            self.idempotency_residual,
            self.unitarity_residual,
            self.diagonal_residual,
            n,
        ]
        .iter()
        .all(|x| x.is_finite() && *x >= 0.0);
        finite
            && self.idempotency_residual <= tol.idempotent * (1.0 + n * n)
            && self.unitarity_residual <= tol.unitary
            && self.diagonal_residual <= tol.diagonal * (1.0 + n)
            && self.norm_bound_claimed.map_or(true, |b| n <= b + 1e-9)
    }

    /// Measures an idempotent `d` in `basis` against `targets`, which are
    /// compared with the leading `targets.len()` diagonal entries.
    pub fn measure(
        d: &ComplexMatrix,
        basis: &OrthonormalBasis,
        targets: &[C64],
        norm_bound: Option<f64>,
    ) -> Result<(Vec<C64>, Certificate)> {
        let realized = diagonal_of(d, basis)?;
        let diagonal_residual = realized
            .iter()
            .zip(targets)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let cert = Certificate {
            idempotency_residual: idempotency_residual(d)?,
            unitarity_residual: basis.unitarity_residual(),
            diagonal_residual,
            norm_bound_claimed: norm_bound,
            norm_observed: operator_norm(d),
            similarity_condition: None,
        };
        Ok((realized, cert))
    }
}
