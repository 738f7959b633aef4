mod common;

use common::*;
use diagkit_core::linalg::{
    change_of_basis, diagonal_of, hermitian_eigen, idempotency_residual, inverse,
    numerical_rank, operator_norm, svd,
};
use diagkit_core::{ComplexMatrix, Error, OrthonormalBasis};
use proptest::prelude::*;

fn hadamard_basis() -> OrthonormalBasis {
    let s = 1.0 / 2f64.sqrt();
    OrthonormalBasis::new(ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]]).unwrap()).unwrap()
}

#[test]
fn diagonal_of_identity_is_ones() {
    let d = diagonal_of(&ComplexMatrix::identity(3), &OrthonormalBasis::standard(3)).unwrap();
    assert_eq!(d, vec![r(1.0); 3]);
}

#[test]
fn diagonal_of_lower_triangular_reads_off() {
    let m = ComplexMatrix::from_rows(&[vec![r(1.0), r(0.0)], vec![c(3.0, -2.0), r(0.0)]]).unwrap();
    let d = diagonal_of(&m, &OrthonormalBasis::standard(2)).unwrap();
    assert_eq!(d, vec![r(1.0), r(0.0)]);
}

#[test]
fn diagonal_of_reflection_in_hadamard_basis_vanishes() {
    let m = ComplexMatrix::diag(&[r(1.0), r(-1.0)]);
    let d = diagonal_of(&m, &hadamard_basis()).unwrap();
    assert!(max_dev(&d, &[r(0.0), r(0.0)]) < 1e-15);
}

#[test]
fn diagonal_of_rejects_mismatched_dimension() {
    let err = diagonal_of(&ComplexMatrix::identity(3), &OrthonormalBasis::standard(2));
    assert!(matches!(err, Err(Error::Shape(_))));
}

#[test]
fn idempotency_examples() {
    assert_eq!(idempotency_residual(&ComplexMatrix::identity(4)).unwrap(), 0.0);
    let m = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[5.0, 0.0]]).unwrap();
    assert!(idempotency_residual(&m).unwrap() < 1e-15);
    let half = ComplexMatrix::diag(&[r(0.5), r(0.5)]);
    assert!((idempotency_residual(&half).unwrap() - 0.25).abs() < 1e-15);
    assert!(matches!(
        idempotency_residual(&ComplexMatrix::zeros(2, 3)),
        Err(Error::Shape(_))
    ));
}

#[test]
fn operator_norm_examples() {
    assert_eq!(operator_norm(&ComplexMatrix::zeros(3, 3)), 0.0);
    let p = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
    assert!((operator_norm(&p) - 1.0).abs() < 1e-15);
    let n = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
    assert!((operator_norm(&n) - 2.0).abs() < 1e-15);
    // [[1,0],[d,0]] has norm √(1+d²).
    for d in [0.5, 3.0, 40.0] {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[d, 0.0]]).unwrap();
        assert!((operator_norm(&m) - (1.0f64 + d * d).sqrt()).abs() < 1e-12 * (1.0 + d));
    }
}

#[test]
fn operator_norm_matches_diagonal_of_unitary_conjugate() {
    let mut g = rng(7);
    for n in [3, 5, 9, 20] {
        let u = random_unitary(&mut g, n);
        let sv: Vec<f64> = (0..n).map(|k| 1.0 + k as f64 * 0.5).collect();
        let d = ComplexMatrix::diag(&sv.iter().map(|x| r(*x)).collect::<Vec<_>>());
        let m = u.matmul(&d).unwrap().matmul(&u.adjoint()).unwrap();
        let expected = sv[n - 1];
        assert!((operator_norm(&m) - expected).abs() <= 1e-10 * expected);
    }
}

#[test]
fn change_of_basis_examples() {
    let m = ComplexMatrix::diag(&[r(1.0), r(-1.0)]);
    let got = change_of_basis(&m, &OrthonormalBasis::standard(2)).unwrap();
    assert_eq!(got, m);
    let swapped = change_of_basis(&m, &hadamard_basis()).unwrap();
    let want = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
    assert!(swapped.sub(&want).unwrap().max_abs() < 1e-15);
    let partial = OrthonormalBasis::standard_subset(2, &[0]).unwrap();
    assert!(matches!(change_of_basis(&m, &partial), Err(Error::Shape(_))));
}

#[test]
fn numerical_rank_examples() {
    assert_eq!(numerical_rank(&ComplexMatrix::identity(4), 1e-9), 4);
    let v = [c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)];
    let outer = ComplexMatrix::from_fn(3, 3, |i, j| v[i] * v[j].conj());
    assert_eq!(numerical_rank(&outer, 1e-9), 1);
    let m = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[7.0, 0.0]]).unwrap();
    assert_eq!(numerical_rank(&m, 1e-9), 1);
}

#[test]
fn jacobi_eigen_reconstructs() {
    let mut g = rng(11);
    let a = random_hermitian(&mut g, 9);
    let (vals, vecs) = hermitian_eigen(&a).unwrap();
    assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    let lam = ComplexMatrix::diag(&vals.iter().map(|x| r(*x)).collect::<Vec<_>>());
    let back = vecs.matmul(&lam).unwrap().matmul(&vecs.adjoint()).unwrap();
    assert!(back.sub(&a).unwrap().max_abs() < 1e-12);
}

#[test]
fn svd_reconstructs_rectangular() {
    let mut g = rng(12);
    for (m, n) in [(5, 3), (3, 5), (6, 6)] {
        let a = random_matrix(&mut g, m, n);
        let s = svd(&a);
        let sig = ComplexMatrix::diag(&s.singular_values.iter().map(|x| r(*x)).collect::<Vec<_>>());
        let back = s.left.matmul(&sig).unwrap().matmul(&s.right.adjoint()).unwrap();
        assert!(back.sub(&a).unwrap().max_abs() < 1e-12, "{m}x{n}");
    }
}

#[test]
fn inverse_of_random_matrix() {
    let mut g = rng(13);
    let a = random_matrix(&mut g, 6, 6);
    let inv = inverse(&a).unwrap();
    let id = a.matmul(&inv).unwrap();
    assert!(id.sub(&ComplexMatrix::identity(6)).unwrap().max_abs() < 1e-10);
    assert!(inverse(&ComplexMatrix::zeros(2, 2)).is_err());
}

#[test]
fn constructor_rejects_bad_input() {
    assert!(matches!(ComplexMatrix::new(2, 2, vec![r(0.0); 3]), Err(Error::Shape(_))));
    assert!(ComplexMatrix::new(1, 1, vec![r(f64::NAN)]).is_err());
    let not_orthonormal = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
    assert!(OrthonormalBasis::new(not_orthonormal).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn full_basis_diagonal_sums_to_trace(seed in any::<u64>(), n in 1usize..10) {
        let mut g = rng(seed);
        let m = random_matrix(&mut g, n, n);
        let b = OrthonormalBasis::new(random_unitary(&mut g, n)).unwrap();
        let d = diagonal_of(&m, &b).unwrap();
        let sum: diagkit_core::C64 = d.iter().sum();
        let tr = m.trace().unwrap();
        prop_assert!((sum - tr).norm() <= 1e-10 * n as f64 * (1.0 + operator_norm(&m)));
        prop_assert!(max_dev(&d, &naive_diagonal(&m, b.matrix())) < 1e-12);
        let conj = change_of_basis(&m, &b).unwrap();
        prop_assert!((conj.trace().unwrap() - tr).norm() <= 1e-12 * n as f64 * (1.0 + operator_norm(&m)));
    }

    #[test]
    fn change_of_basis_preserves_idempotency(seed in any::<u64>(), n in 2usize..8, k in 1usize..7) {
        let mut g = rng(seed);
        let k = k.min(n - 1);
        // Oblique idempotent: S P S⁻¹ with P a coordinate projection.
        let s = random_matrix(&mut g, n, n).add(&ComplexMatrix::identity(n).scale(r(3.0))).unwrap();
        let p = ComplexMatrix::diag(&(0..n).map(|i| r(if i < k { 1.0 } else { 0.0 })).collect::<Vec<_>>());
        let d = s.matmul(&p).unwrap().matmul(&inverse(&s).unwrap()).unwrap();
        let b = OrthonormalBasis::new(random_unitary(&mut g, n)).unwrap();
        let before = idempotency_residual(&d).unwrap();
        let after = idempotency_residual(&change_of_basis(&d, &b).unwrap()).unwrap();
        let scale = 1.0 + operator_norm(&d).powi(2);
        prop_assert!((before - after).abs() <= 1e-10 * scale);
    }

    #[test]
    fn power_iteration_agrees_with_svd(seed in any::<u64>(), m in 1usize..12, n in 1usize..12) {
        let mut g = rng(seed);
        let a = random_matrix(&mut g, m, n);
        let exact = svd(&a).singular_values[0];
        prop_assert!((operator_norm(&a) - exact).abs() <= 1e-10 * exact);
    }
}
