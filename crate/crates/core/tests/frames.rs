mod common;

use common::*;
use diagkit_core::frames::*;
use diagkit_core::synth::{idem_bounded_diag, idem_finite_rank, Route};
use diagkit_core::{ComplexMatrix, Error, C64};
use proptest::prelude::*;

fn random_frame(seed: u64, dim: usize, n: usize) -> Vec<Vec<C64>> {
    let mut g = rng(seed);
    (0..n).map(|_| (0..dim).map(|_| random_complex(&mut g, 1.0)).collect()).collect()
}

fn idem_residual(m: &ComplexMatrix) -> f64 {
    m.matmul(m).unwrap().sub(m).unwrap().max_abs()
}

#[test]
fn orthonormal_frame_gives_identity() {
    let e: Vec<Vec<C64>> = (0..3).map(|i| (0..3).map(|j| r(if i == j { 1.0 } else { 0.0 })).collect()).collect();
    let p = FramePair::new(3, e.clone(), e).unwrap();
    assert_eq!(cross_gramian(&p).unwrap(), ComplexMatrix::identity(3));
}

#[test]
fn one_dimensional_pair() {
    let p = FramePair::new(1, vec![vec![r(1.0)], vec![r(0.0)]], vec![vec![r(1.0)], vec![r(1.0)]]).unwrap();
    assert_eq!(p.duality_residual().unwrap(), 0.0);
    let g = cross_gramian(&p).unwrap();
    assert_eq!(g, ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]).unwrap());
    assert_eq!(p.inner_products(), vec![r(1.0), r(0.0)]);
}

#[test]
fn non_dual_pair_rejected() {
    let p = FramePair::new(1, vec![vec![r(1.0)]], vec![vec![r(2.0)]]).unwrap();
    assert!(matches!(cross_gramian(&p), Err(Error::Precondition { .. })));
    assert!(FramePair::new(2, vec![vec![r(1.0)]], vec![vec![r(1.0), r(0.0)]]).is_err());
}

#[test]
fn extract_from_identity_and_skew() {
    let p = extract_frames(&ComplexMatrix::identity(3)).unwrap();
    assert_eq!(p.dim, 3);
    assert!(p.duality_residual().unwrap() <= 1e-12);
    let d = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]).unwrap();
    let q = extract_frames(&d).unwrap();
    assert_eq!(q.dim, 1);
    assert!(max_dev(&q.inner_products(), &[r(1.0), r(0.0)]) <= 1e-12);
    assert!(cross_gramian(&q).unwrap().sub(&d).unwrap().max_abs() <= 1e-12);
}

#[test]
fn diagonal_transport_from_bounded_synthesis() {
    let d = vec![c(2.0, 1.0), r(-1.0), r(0.0), c(0.5, -0.5), r(3.0)];
    let res = idem_bounded_diag(&d, 2, 3).unwrap();
    // Diagonal in the realization basis: conjugate the idempotent into it.
    let b = res.basis.matrix();
    let in_basis = b.adjoint().matmul(&res.matrix).unwrap().matmul(b).unwrap();
    let pair = extract_frames(&in_basis).unwrap();
    assert!(max_dev(&pair.inner_products()[..d.len()], &d) <= 1e-9 * (1.0 + res.certificate.norm_observed));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_dual_gramian_is_idempotent(seed in 0u64..10_000, dim in 1usize..5, extra in 0usize..5) {
        let n = dim + extra;
        let x = random_frame(seed, dim, n);
        let y = canonical_dual(dim, &x).unwrap();
        let p = FramePair::new(dim, x, y).unwrap();
        prop_assert!(p.duality_residual().unwrap() <= 1e-9);
        let g = cross_gramian(&p).unwrap();
        prop_assert!(idem_residual(&g) <= 1e-9);
        let tr = g.trace().unwrap();
        prop_assert!((tr - r(dim as f64)).norm() <= 1e-9);
        prop_assert!(max_dev(&g.diagonal(), &p.inner_products()) <= 1e-12);
        let back = extract_frames(&g).unwrap();
        prop_assert_eq!(back.dim, dim);
        prop_assert!(cross_gramian(&back).unwrap().sub(&g).unwrap().max_abs() <= 1e-9);
    }

    #[test]
    fn synthesized_round_trip(seed in 0u64..1000, len in 2usize..8, m in 1usize..4) {
        let mut g = rng(seed);
        let mut d: Vec<C64> = (0..len).map(|_| random_complex(&mut g, 1.0)).collect();
        let shift = (r(m as f64) - d.iter().sum::<C64>()) / len as f64;
        d.iter_mut().for_each(|z| *z += shift);
        let res = idem_finite_rank(&d, Route::Gkl).unwrap();
        let pair = extract_frames(&res.matrix).unwrap();
        let back = cross_gramian(&pair).unwrap();
        prop_assert!(back.sub(&res.matrix).unwrap().max_abs() <= 1e-9 * (1.0 + res.certificate.norm_observed));
        prop_assert!(max_dev(&pair.inner_products()[..len], &d) <= 1e-9 * (1.0 + res.certificate.norm_observed));
    }
}
