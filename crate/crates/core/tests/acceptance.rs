//! Acceptance criteria AC1–AC14. Each criterion is its own test and writes
//! one `ACn: PASS|FAIL` line straight to stdout (visible without
//! `--nocapture`).

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use common::*;
use diagkit_core::classify::*;
use diagkit_core::frames::*;
use diagkit_core::linalg::{
    change_of_basis, diagonal_of, hermitian_eigen, idempotency_residual, numerical_rank,
    operator_norm,
};
use diagkit_core::numrange::*;
use diagkit_core::rebase::*;
use diagkit_core::synth::*;
use diagkit_core::{ComplexMatrix, OrthonormalBasis, C64};
use rand::Rng;

struct Criterion {
    id: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 8 {
            self.failures.push(what());
        }
    }
}

fn run(id: &'static str, budget: Option<Duration>, body: impl FnOnce(&mut Criterion)) {
    let start = Instant::now();
    let mut c = Criterion { id, failures: Vec::new() };
    body(&mut c);
    let elapsed = start.elapsed();
    if let Some(b) = budget {
        c.check(elapsed <= b, || format!("runtime {elapsed:.2?} exceeds {b:?}"));
    }
    let line = if c.failures.is_empty() {
        format!("{}: PASS ({elapsed:.2?})\n", c.id)
    } else {
        format!("{}: FAIL ({elapsed:.2?}): {}\n", c.id, c.failures.join("; "))
    };
    std::io::stdout().write_all(line.as_bytes()).unwrap();
    assert!(c.failures.is_empty(), "{}", line.trim_end());
}

fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.sub(b).unwrap().max_abs()
}

fn random_sum_m(g: &mut impl Rng, len: usize, m: usize, radius: f64) -> Vec<C64> {
    let mut d: Vec<C64> = (0..len).map(|_| random_complex(g, radius)).collect();
    let shift = (r(m as f64) - d.iter().sum::<C64>()) / len as f64;
    d.iter_mut().for_each(|z| *z += shift);
    d
}

#[test]
fn ac01_two_by_two() {
    run("AC1", Some(Duration::from_secs(1)), |c| {
        let mut g = rng(101);
        for _ in 0..1000 {
            let d = loop {
                let z = random_complex(&mut g, 10.0);
                if z.norm() <= 10.0 {
                    break z;
                }
            };
            let res = idem_2x2_diag(d).unwrap();
            let want = [d * 3.0 - 1.0, r(2.0) - d * 3.0];
            let dev = max_dev(&res.matrix.diagonal(), &want);
            c.check(dev <= 1e-12, || format!("d={d}: diagonal off by {dev:.2e}"));
            let sq = max_abs_diff(&res.matrix.matmul(&res.matrix).unwrap(), &res.matrix);
            c.check(sq <= 1e-12, || format!("d={d}: idempotency {sq:.2e}"));
            let norm = operator_norm(&res.matrix);
            c.check(norm <= 6.0 * d.norm() + 4.0 + 1e-9, || format!("d={d}: norm {norm}"));
        }
    });
}

#[test]
fn ac02_rotation_closed_forms() {
    run("AC2", None, |c| {
        let mut g = rng(102);
        for _ in 0..1000 {
            let d: f64 = g.gen_range(0.0..20.0);
            let th: f64 = g.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let out = rotation_diagonal(d, th);
            // Explicit conjugation R* A R with R = [[cos, −sin], [sin, cos]].
            let a = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[d, 0.0]]).unwrap();
            let rot = ComplexMatrix::from_real_rows(&[&[th.cos(), -th.sin()], &[th.sin(), th.cos()]]).unwrap();
            let conj = rot.adjoint().matmul(&a).unwrap().matmul(&rot).unwrap();
            let scale = 1.0 + d;
            c.check((conj[(0, 0)].re - out.diag_hi).abs() <= 1e-12 * scale, || format!("hi at d={d}, θ={th}"));
            c.check((conj[(1, 1)].re - out.diag_lo).abs() <= 1e-12 * scale, || format!("lo at d={d}, θ={th}"));
            c.check((out.diag_hi + out.diag_lo - 1.0).abs() <= 1e-12 * scale, || format!("sum at d={d}"));
        }
        let m = min_diagonal_rotation(3f64.sqrt());
        c.check((m.diag_lo + 0.5).abs() <= 1e-12, || format!("min at √3 is {}", m.diag_lo));
    });
}

#[test]
fn ac03_zero_diagonal_basis() {
    run("AC3", Some(Duration::from_secs(5)), |c| {
        let mut g = rng(103);
        for case in 0..200 {
            let n = g.gen_range(1..=12);
            let m = random_matrix(&mut g, n, n);
            let x = m.shift(m.trace().unwrap() / n as f64).unwrap();
            let b = zero_diagonal_basis(&x).unwrap();
            let norm = operator_norm(&x);
            let diag = naive_diagonal(&x, b.matrix());
            let worst = diag.iter().map(|z| z.norm()).fold(0.0, f64::max);
            c.check(worst <= 1e-9 * (1.0 + norm), || format!("case {case}: diagonal {worst:.2e}"));
            let u = b.unitarity_residual();
            c.check(u <= 1e-10, || format!("case {case}: unitarity {u:.2e}"));
        }
    });
}

fn quad(a: &ComplexMatrix, v: &[C64]) -> C64 {
    let av = a.mul_vec(v).unwrap();
    av.iter().zip(v).map(|(x, y)| x * y.conj()).sum()
}

#[test]
fn ac04_fan_pair() {
    run("AC4", None, |c| {
        let mut g = rng(104);
        for _ in 0..1000 {
            let a = random_matrix(&mut g, 2, 2);
            let lambda: f64 = g.gen_range(0.0..=1.0);
            let t = SegmentTarget::from_lambda(a[(0, 0)], a[(1, 1)], lambda).unwrap();
            let (b, f) = fan_pair(&a, &t).unwrap();
            let qf = quad(&a, &f);
            let qb = quad(&a, &b);
            c.check((qf - t.target).norm() <= 1e-11, || format!("target residual {:.2e}", (qf - t.target).norm()));
            let tr = (qf + qb - a[(0, 0)] - a[(1, 1)]).norm();
            c.check(tr <= 1e-11, || format!("trace conservation {tr:.2e}"));
            c.check(f[0].norm_sqr() <= t.lambda + 1e-11, || format!("overlap {} > λ {}", f[0].norm_sqr(), t.lambda));
        }
    });
}

#[test]
fn ac05_bootstrap_fan() {
    run("AC5", None, |c| {
        let mut g = rng(105);
        for case in 0..60 {
            let n = g.gen_range(1..20);
            let hermitian = case % 2 == 0;
            let t = if hermitian { random_hermitian(&mut g, n + 1) } else { random_matrix(&mut g, n + 1, n + 1) };
            let e = OrthonormalBasis::new(random_unitary(&mut g, n + 1)).unwrap();
            let r_vals = diagonal_of(&t, &e).unwrap();
            let mut d = Vec::new();
            let mut lam = Vec::new();
            let mut prev = r_vals[0];
            for i in 1..=n {
                let l: f64 = g.gen_range(0.0..=1.0);
                let x = prev * l + r_vals[i] * (1.0 - l);
                d.push(x);
                lam.push(l);
                prev = x;
            }
            let plan = BootstrapPlan::new(r_vals.clone(), d.clone(), lam).unwrap();
            let out = bootstrap_fan(&t, &e, &plan).unwrap();
            let got = naive_diagonal(&t, out.b.matrix());
            for k in 1..=n {
                let want = r_vals[k] + plan.d_at(k - 1) - plan.d_at(k);
                c.check((got[k - 1] - want).norm() <= 1e-10, || format!("case {case} step {k}: {:.2e}", (got[k - 1] - want).norm()));
            }
            c.check(out.span_residual <= 1e-9, || format!("case {case}: span {:.2e}", out.span_residual));

            // Halving plan: r_n = 2d_n − d_{n−1} realizes d itself.
            let targets: Vec<C64> = (0..n).map(|_| random_complex(&mut g, 2.0)).collect();
            let mut diag = vec![random_complex(&mut g, 2.0)];
            let mut p = diag[0];
            for x in &targets {
                diag.push(x * 2.0 - p);
                p = *x;
            }
            let tt = ComplexMatrix::from_fn(n + 1, n + 1, |i, j| if i == j { diag[i] } else if hermitian { r(0.0) } else { random_complex(&mut rng((case * 1000 + i * 31 + j) as u64), 0.5) });
            let e2 = OrthonormalBasis::standard(n + 1);
            let plan = BootstrapPlan::halving(diag[0], targets.clone()).unwrap();
            let out = bootstrap_fan(&tt, &e2, &plan).unwrap();
            let got = naive_diagonal(&tt, out.b.matrix());
            let dev = max_dev(&got, &targets);
            c.check(dev <= 1e-10, || format!("case {case}: halving deviation {dev:.2e}"));
        }
    });
}

#[test]
fn ac06_zero_diagonalization() {
    run("AC6", Some(Duration::from_secs(2)), |c| {
        let k = 40;
        let mut dmat = ComplexMatrix::zeros(2 * k, 2 * k);
        for i in 0..k {
            dmat[(i, i)] = r(1.0);
            dmat[(k + i, i)] = r(1.0);
        }
        let pairs: Vec<(usize, usize)> = (0..k).map(|n| (n, k + n)).collect();
        let out = zero_diagonalize_idempotent(&dmat, &pairs).unwrap();
        // Brute force: first m with Σ_{n≤m} d⁻ ≥ 1 + d⁻.
        let dm = (2f64.sqrt() - 1.0) / 2.0;
        let brute = (1..=k).find(|&m| m as f64 * dm >= 1.0 + dm).unwrap();
        c.check(out.plan.m[0] == 6 && brute == 6, || format!("m1 = {}, brute force {brute}", out.plan.m[0]));
        for (i, grp) in out.plan.groups.iter().enumerate() {
            c.check(grp.sum.norm() <= 1e-10, || format!("group {i} sums to {}", grp.sum));
        }
        let diag = naive_diagonal(&dmat, out.basis.matrix());
        let worst = diag[..out.processed].iter().map(|z| z.norm()).fold(0.0, f64::max);
        c.check(out.processed > 0 && worst <= 1e-9, || format!("processed {} worst {worst:.2e}", out.processed));
        let conj = change_of_basis(&dmat, &out.basis).unwrap();
        let idem = idempotency_residual(&conj).unwrap();
        c.check(idem <= 1e-9 * (1.0 + operator_norm(&dmat).powi(2)), || format!("idempotency {idem:.2e}"));
        c.check(out.basis.unitarity_residual() <= 1e-10, || "unitarity".into());
    });
}

#[test]
fn ac07_constant_and_bounded() {
    run("AC7", None, |c| {
        let mut g = rng(107);
        let k = 60;
        let mut short = Vec::new();
        for _ in 0..20 {
            let d = random_complex(&mut g, 3.0);
            let res = idem_constant_diag(d, k).unwrap();
            let constant = res.realized.iter().filter(|z| (*z - d).norm() <= 1e-10).count();
            if constant < 2 * k - 2 {
                short.push(constant);
            }
            let norm = res.certificate.norm_observed;
            c.check(norm <= 6.0 * d.norm() + 4.0 + 1e-9, || format!("d={d}: norm {norm}"));
            c.check(res.certificate.idempotency_residual <= 1e-9, || "constant: idempotency".into());
        }
        c.check(short.is_empty(), || {
            format!(
                "constant diagonal on {}..={} of {} entries for {}/20 values of d (need {})",
                short.iter().min().unwrap(),
                short.iter().max().unwrap(),
                2 * k,
                short.len(),
                2 * k - 2
            )
        });
        for case in 0..50 {
            let d: Vec<C64> = (0..40)
                .map(|_| loop {
                    let z = random_complex(&mut g, 5.0);
                    if z.norm() <= 5.0 {
                        break z;
                    }
                })
                .collect();
            let res = idem_bounded_diag(&d, DEFAULT_PARTITION, DEFAULT_DEPTH).unwrap();
            let sup = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let diag = naive_diagonal(&res.matrix, res.basis.matrix());
            let dev = max_dev(&diag[..40], &d);
            c.check(res.processed == 40 && dev <= 1e-9, || format!("case {case}: prefix deviation {dev:.2e}"));
            let idem = idempotency_residual(&res.matrix).unwrap();
            c.check(idem <= 1e-9, || format!("case {case}: idempotency {idem:.2e}"));
            let norm = operator_norm(&res.matrix);
            c.check(norm <= 18.0 * sup + 4.0 + 1e-9, || format!("case {case}: norm {norm}"));
        }
        let zeros = vec![r(0.0); 40];
        let res = idem_bounded_diag(&zeros, DEFAULT_PARTITION, DEFAULT_DEPTH).unwrap();
        let diag = naive_diagonal(&res.matrix, res.basis.matrix());
        let worst = diag[..40].iter().map(|z| z.norm()).fold(0.0, f64::max);
        c.check(res.matrix.max_abs() > 0.5 && worst <= 1e-9, || format!("zero prefix: max entry {}, diagonal {worst:.2e}", res.matrix.max_abs()));
        c.check(idempotency_residual(&res.matrix).unwrap() <= 1e-9, || "zero prefix: idempotency".into());
    });
}

#[test]
fn ac08_finite_rank() {
    run("AC8", Some(Duration::from_secs(10)), |c| {
        let mut g = rng(108);
        for case in 0..100 {
            let len = g.gen_range(1..=30);
            let m = g.gen_range(1..=3);
            let d = random_sum_m(&mut g, len, m, 1.0);
            let fan = idem_finite_rank(&d, Route::Fan).unwrap();
            let gkl = idem_finite_rank(&d, Route::Gkl).unwrap();
            let mut realized = Vec::new();
            for (name, res) in [("fan", &fan), ("gkl", &gkl)] {
                let rank = numerical_rank(&res.matrix, 1e-9);
                c.check(rank == m, || format!("case {case} {name}: rank {rank} ≠ {m}"));
                let diag = naive_diagonal(&res.matrix, res.basis.matrix());
                let dev = max_dev(&diag[..len], &d);
                c.check(dev <= 1e-9, || format!("case {case} {name}: diagonal {dev:.2e}"));
                let tail = diag[len..].iter().map(|z| z.norm()).fold(0.0, f64::max);
                c.check(tail <= 1e-9, || format!("case {case} {name}: tail {tail:.2e}"));
                let tr = res.matrix.trace().unwrap();
                c.check((tr - r(m as f64)).norm() <= 1e-8, || format!("case {case} {name}: trace {tr}"));
                let idem = idempotency_residual(&res.matrix).unwrap();
                let norm = operator_norm(&res.matrix);
                c.check(idem <= 1e-9 * (1.0 + norm * norm), || format!("case {case} {name}: idempotency {idem:.2e}"));
                realized.push(diag[..len].to_vec());
            }
            let agree = max_dev(&realized[0], &realized[1]);
            c.check(agree <= 2e-9, || format!("case {case}: routes differ by {agree:.2e}"));
        }
    });
}

#[test]
fn ac09_rank_one() {
    run("AC9", None, |c| {
        let mut g = rng(109);
        for case in 0..500 {
            let len = g.gen_range(1..10);
            let d: Vec<C64> = (0..len).map(|_| random_complex(&mut g, 1.0)).collect();
            let t = rank_one_outer(&d);
            let tr = t.trace().unwrap();
            let err = max_abs_diff(&t.matmul(&t).unwrap(), &t.scale(tr));
            c.check(err <= 1e-10, || format!("case {case}: T² − trace(T)T = {err:.2e}"));
            c.check(idem_rank_one(&d).is_err() == ((tr - r(1.0)).norm() > 1e-10), || format!("case {case}: accepted a sum ≠ 1"));
            let one = random_sum_m(&mut g, len, 1, 1.0);
            match idem_rank_one(&one) {
                Ok(res) => {
                    let idem = max_abs_diff(&res.matrix.matmul(&res.matrix).unwrap(), &res.matrix);
                    c.check(idem <= 1e-10, || format!("case {case}: idempotency {idem:.2e}"));
                    c.check(max_dev(&res.matrix.diagonal(), &one) <= 1e-12, || format!("case {case}: diagonal"));
                }
                Err(e) => c.check(false, || format!("case {case}: rejected sum 1: {e}")),
            }
        }
    });
}

#[test]
fn ac10_kadison() {
    run("AC10", None, |c| {
        // Heads on the grid k/6, lengths 0..=6, tail zeros.
        let mut checked_projections = 0;
        for len in 0..=6u32 {
            for code in 0..7usize.pow(len) {
                let mut x = code;
                let ks: Vec<usize> = (0..len).map(|_| { let k = x % 7; x /= 7; k }).collect();
                let head: Vec<f64> = ks.iter().map(|&k| k as f64 / 6.0).collect();
                let integral = ks.iter().sum::<usize>() % 6 == 0;
                let v = kadison_feasibility(&SequenceSpec::new(head.clone(), Tail::Zeros).unwrap()).unwrap();
                c.check(v.feasible == integral, || format!("{head:?}: feasible {} vs integer sum {integral}", v.feasible));
                if integral && len > 0 {
                    let p = projection_with_diagonal(&head).unwrap();
                    let herm = max_abs_diff(&p, &p.adjoint());
                    let idem = max_abs_diff(&p.matmul(&p).unwrap(), &p);
                    let want: Vec<C64> = head.iter().map(|x| r(*x)).collect();
                    let dev = max_dev(&p.diagonal(), &want);
                    c.check(herm <= 1e-9 && idem <= 1e-9 && dev <= 1e-9, || format!("{head:?}: P*−P {herm:.1e}, P²−P {idem:.1e}, diag {dev:.1e}"));
                    checked_projections += 1;
                }
            }
        }
        c.check(checked_projections > 1000, || format!("only {checked_projections} projections built"));
    });
}

#[test]
fn ac11_abs_sum_rebasis() {
    run("AC11", None, |c| {
        let n = 24;
        let d: Vec<C64> = (0..n).map(|i| r(if i % 2 == 0 { 1.0 } else { -1.0 })).collect();
        let mut g = rng(111);
        let u = random_unitary(&mut g, n);
        let t = u.matmul(&ComplexMatrix::diag(&d)).unwrap().matmul(&u.adjoint()).unwrap();
        let e = OrthonormalBasis::new(u).unwrap();
        let n_k: Vec<usize> = (1..=n / 2).map(|k| 2 * k).collect();
        let diag = diagonal_of(&t, &e).unwrap();
        let info = PartialSumTrace::from_diagonal(&diag, n_k, r(0.0)).unwrap();
        let out = absolutely_summable_rebasis(&t, &e, &info).unwrap();
        let bound = info.s_at(2).norm() + 1.5;
        c.check(out.absolute_sum <= bound + 1e-8, || format!("alternating: {} > {bound}", out.absolute_sum));
        for case in 0..50 {
            let n = g.gen_range(4..40);
            let d: Vec<C64> = (0..n)
                .map(|i| {
                    let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                    C64::new(s * g.gen_range(0.5..2.0), g.gen_range(-0.5..0.5)) / (1.0 + i as f64 / 4.0)
                })
                .collect();
            let u = random_unitary(&mut g, n);
            let t = u.matmul(&ComplexMatrix::diag(&d)).unwrap().matmul(&u.adjoint()).unwrap();
            let e = OrthonormalBasis::new(u).unwrap();
            let diag = diagonal_of(&t, &e).unwrap();
            let limit: C64 = diag.iter().sum();
            let info = PartialSumTrace::derive(&diag, limit);
            let out = absolutely_summable_rebasis(&t, &e, &info).unwrap();
            let bound = info.n_k.first().map_or(0.0, |&n1| info.s_at(n1).norm()) + 1.5;
            c.check(out.absolute_sum <= bound + 1e-8, || format!("case {case}: {} > {bound}", out.absolute_sum));
            c.check(out.basis.unitarity_residual() <= 1e-10, || format!("case {case}: unitarity"));
        }
    });
}

#[test]
fn ac12_classification() {
    run("AC12", None, |c| {
        let mut g = rng(112);
        let mut results = Vec::new();
        results.push(idem_2x2_diag(c_of(0.3, 0.2)).unwrap());
        results.push(idem_constant_diag(r(0.1), 4).unwrap());
        results.push(idem_matrix_exact(&[r(2.0), r(-1.0), r(0.0)]).unwrap());
        results.push(idem_rank_one(&[r(2.0), r(-1.0)]).unwrap());
        for _ in 0..20 {
            let len = g.gen_range(2..12);
            let m = g.gen_range(1..4);
            let d = random_sum_m(&mut g, len, m, 1.0);
            results.push(idem_finite_rank(&d, Route::Fan).unwrap());
            results.push(idem_finite_rank(&d, Route::Gkl).unwrap());
        }
        for (i, res) in results.iter().enumerate() {
            let rank = numerical_rank(&res.matrix, 1e-9) as f64;
            match trace_shape(&IdempotentModel::Finite(res.matrix.clone())).unwrap() {
                TraceShape::Point(t) => c.check((t - r(rank)).norm() <= 1e-8, || format!("result {i}: point {t} vs rank {rank}")),
                other => c.check(false, || format!("result {i}: shape {other:?}")),
            }
        }
        let model = |in_l2| IdempotentModel::Infinite {
            nilpotent: SequenceSpec::new(vec![], Tail::ClassFlags { in_l1: false, in_l2, sup: 1.0 }).unwrap(),
        };
        c.check(trace_shape(&model(true)).unwrap() == TraceShape::Empty, || "ℓ² model not empty".into());
        c.check(trace_shape(&model(false)).unwrap() == TraceShape::Plane, || "non-ℓ² model not plane".into());

        let d: Vec<f64> = (1..=10_000).map(|n| 1.0 / (n as f64).sqrt()).collect();
        let grow = finite_section_trace_growth(&d, 0.0).unwrap();
        c.check(grow.neg[9_999] >= 2.0, || format!("1/√n: negative part {}", grow.neg[9_999]));
        c.check(grow.sandwich_violation() <= 0.0, || format!("1/√n: sandwich violated by {}", grow.sandwich_violation()));
        let d: Vec<f64> = (1..=10_000).map(|n| 1.0 / n as f64).collect();
        let grow = finite_section_trace_growth(&d, 0.0).unwrap();
        let cap = grow.c2 * std::f64::consts::PI.powi(2) / 6.0 + 1e-6;
        c.check(grow.neg.iter().all(|x| 2.0 * x <= cap), || "1/n: negative part exceeds C₂π²/6".into());
        c.check(grow.sandwich_violation() <= 0.0, || "1/n: sandwich violated".into());
    });
}

fn c_of(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn ac13_spectrum() {
    run("AC13", None, |c| {
        let mut g = rng(113);
        for _ in 0..1000 {
            let z = random_complex(&mut g, 5.0);
            let th: f64 = g.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let (hi, lo) = herm_part_spectrum_2x2(z, th);
            let e = C64::from_polar(1.0, th);
            let h = ComplexMatrix::new(2, 2, vec![r(2.0 * th.cos()), (e * z).conj(), e * z, r(0.0)]).unwrap();
            let (vals, _) = hermitian_eigen(&h).unwrap();
            let dev = (vals[1] - hi).abs().max((vals[0] - lo).abs());
            c.check(dev <= 1e-12, || format!("z={z}, θ={th}: {dev:.2e}"));
        }
    });
}

#[test]
fn ac14_frames() {
    run("AC14", None, |c| {
        let mut g = rng(114);
        for case in 0..100 {
            let dim = g.gen_range(1..6);
            let n = dim + g.gen_range(0..6);
            let x: Vec<Vec<C64>> = (0..n).map(|_| (0..dim).map(|_| random_complex(&mut g, 1.0)).collect()).collect();
            let y = canonical_dual(dim, &x).unwrap();
            let pair = FramePair::new(dim, x, y).unwrap();
            let gram = cross_gramian(&pair).unwrap();
            let idem = max_abs_diff(&gram.matmul(&gram).unwrap(), &gram);
            c.check(idem <= 1e-9, || format!("case {case}: Gramian idempotency {idem:.2e}"));
            let back = cross_gramian(&extract_frames(&gram).unwrap()).unwrap();
            let rt = max_abs_diff(&back, &gram);
            c.check(rt <= 1e-9, || format!("case {case}: round trip {rt:.2e}"));
        }
        for case in 0..20 {
            let len = g.gen_range(2..10);
            let m = g.gen_range(1..4);
            let d = random_sum_m(&mut g, len, m, 1.0);
            let res = idem_finite_rank(&d, Route::Fan).unwrap();
            let b = res.basis.matrix();
            let in_basis = b.adjoint().matmul(&res.matrix).unwrap().matmul(b).unwrap();
            let pair = extract_frames(&in_basis).unwrap();
            let dev = max_dev(&pair.inner_products()[..len], &d);
            c.check(dev <= 1e-9 * (1.0 + res.certificate.norm_observed), || format!("transport case {case}: {dev:.2e}"));
        }
    });
}
