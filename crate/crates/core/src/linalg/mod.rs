//! Dense complex linear algebra and verification metrics.

mod basis;
mod certificate;
mod jacobi;
mod matrix;
mod norms;
mod solve;

pub use basis::OrthonormalBasis;
pub use certificate::Certificate;
pub use jacobi::{hermitian_eigen, svd, Svd};
pub use matrix::{inner, vector_norm, ComplexMatrix, C64};
pub use norms::{
    change_of_basis, compress, diagonal_of, idempotency_residual, numerical_rank,
    operator_norm, projection_distance,
};
pub use solve::{condition_number, inverse, solve};

pub(crate) use matrix::{SparseRows, ONE, ZERO};
