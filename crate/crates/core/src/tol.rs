//! Tolerance constants shared across the crate.

/// Basis unitarity: `max |B*B - I|`.
pub const UNITARY: f64 = 1e-10;
/// Idempotency residual `‖D² - D‖` (scaled by `1 + ‖D‖²` where noted).
pub const IDEMPOTENT: f64 = 1e-9;
/// Diagonal match on realized prefixes.
pub const DIAGONAL: f64 = 1e-9;
/// Relative singular-value threshold for numerical rank and kernels.
pub const RANK: f64 = 1e-9;
/// Parameter tolerance for the bisections.
pub const BISECTION: f64 = 1e-12;
/// Iteration cap for the bisections.
pub const BISECTION_MAX_ITER: usize = 200;
/// Power iteration caps for the operator norm.
pub const POWER_MAX_ITER: usize = 500;
pub const POWER_TOL: f64 = 1e-12;

/// Overridable tolerance set used by certificates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub unitary: f64,
    pub idempotent: f64,
    pub diagonal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            unitary: UNITARY,
            idempotent: IDEMPOTENT,
            diagonal: DIAGONAL,
        }
    }
}
