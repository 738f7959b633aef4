#![allow(dead_code)]

use diagkit_core::{ComplexMatrix, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn random_complex(rng: &mut impl Rng, radius: f64) -> C64 {
    C64::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius))
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| random_complex(rng, 1.0))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let a = random_matrix(rng, n, n);
    a.add(&a.adjoint()).unwrap().scale(r(0.5))
}

/// Independent unitary: QR of a random matrix by modified Gram-Schmidt.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let a = random_matrix(rng, n, n);
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for j in 0..n {
        let mut v = a.column(j);
        for q in &cols {
            let p: C64 = v.iter().zip(q).map(|(x, y)| x * y.conj()).sum();
            for (x, y) in v.iter_mut().zip(q) {
                *x -= p * y;
            }
        }
        let n2 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= n2);
        cols.push(v);
    }
    ComplexMatrix::from_columns(n, &cols).unwrap()
}

pub fn max_dev(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn naive_diagonal(m: &ComplexMatrix, cols: &ComplexMatrix) -> Vec<C64> {
    (0..cols.cols())
        .map(|j| {
            let v = cols.column(j);
            let mut acc = C64::new(0.0, 0.0);
            let support: Vec<usize> = (0..v.len()).filter(|&i| v[i] != C64::new(0.0, 0.0)).collect();
            for &a in &support {
                for &b in &support {
                    acc += m[(a, b)] * v[b] * v[a].conj();
                }
            }
            acc
        })
        .collect()
}
