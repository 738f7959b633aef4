//! Idempotent operators with prescribed diagonals, at desk scale.
//!
//! Everything here works on finite dense complex matrices. Infinite
//! constructions are realized on exact finite truncations: each result
//! reports how much of the requested diagonal it realizes, and which
//! trailing entries are fill or boundary balance.
//!
//! The modules build on each other bottom-up:
//!
//! * [`linalg`]: dense complex matrices, orthonormal bases, norms, Jacobi
//!   solvers and verification residuals.
//! * [`numrange`]: constructive numerical-range tools (2×2 rotations, Fan's
//!   quantitative convexity step, zero- and constant-diagonal bases).
//! * [`rebase`]: basis constructions on a fixed operator.
//! * [`synth`]: idempotents realizing prescribed diagonals.
//! * [`classify`]: canonical decomposition and the feasibility deciders.
//! * [`frames`]: the bridge between dual frame pairs and idempotents.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::many_single_char_names)]

extern crate alloc;

pub mod classify;
pub mod error;
pub mod frames;
pub mod linalg;
pub mod numrange;
pub mod rebase;
pub mod synth;
pub mod tol;

mod math;

pub use error::{Error, Result};
pub use linalg::{Certificate, ComplexMatrix, OrthonormalBasis, C64};
pub use tol::Tolerances;
