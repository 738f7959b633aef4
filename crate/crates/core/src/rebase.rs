//! Basis constructions on a fixed operator: the bootstrapped Fan
//! iteration, explicit zero-diagonalization of idempotents in paired form,
//! and the summable-to-absolutely-summable rebasis.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, shape, Error, Result};
use crate::linalg::{
    diagonal_of, idempotency_residual, inner, operator_norm, ComplexMatrix, OrthonormalBasis,
    SparseRows, C64, ZERO,
};
use crate::numrange::{
    constant_diagonal_rebasis, d_minus, fan_pair_unchecked, min_diagonal_rotation,
    theta_for_target, SegmentTarget,
};
use crate::{math, tol};

/// Inputs of the bootstrapped Fan iteration.
///
/// `r` holds `(T e_n, e_n)` for `n = 0..=N`; `d[n-1]` is the target `d_n`
/// for `n = 1..=N` (with `d_0 := r_0`); `lambda[n-1]` is the convexity
/// coefficient of `d_n` on `[d_{n-1}, r_n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapPlan {
    pub r: Vec<C64>,
    pub d: Vec<C64>,
    pub lambda: Vec<f64>,
}

impl BootstrapPlan {
    /// Validates lengths and the segment condition at every step.
    pub fn new(r: Vec<C64>, d: Vec<C64>, lambda: Vec<f64>) -> Result<Self> {
        if r.is_empty() || d.len() + 1 != r.len() || lambda.len() != d.len() {
            return Err(shape(format!(
                "plan needs N+1 diagonal entries and N targets and coefficients, got {}, {}, {}",
                r.len(),
                d.len(),
                lambda.len()
            )));
        }
        let plan = BootstrapPlan { r, d, lambda };
        for n in 1..plan.r.len() {
            let prev = plan.d_at(n - 1);
            let l = plan.lambda[n - 1];
            if !(0.0..=1.0).contains(&l) {
                return Err(domain(format!("step {n}: coefficient {l} outside [0, 1]")));
            }
            let expect = prev * l + plan.r[n] * (1.0 - l);
            let dev = (expect - plan.d[n - 1]).norm();
            let scale = 1.0 + prev.norm() + plan.r[n].norm();
            if dev > 1e-10 * scale {
                return Err(domain(format!(
                    "step {n}: target {} is not at coefficient {l} on [{prev}, {}] (off by {dev:.3e})",
                    plan.d[n - 1],
                    plan.r[n]
                )));
            }
        }
        Ok(plan)
    }

    /// Plan with every coefficient 1/2: `r_n = 2 d_n − d_{n-1}`.
    pub fn halving(r0: C64, d: Vec<C64>) -> Result<Self> {
        let mut r = vec![r0];
        let mut prev = r0;
        for x in &d {
            r.push(*x * 2.0 - prev);
            prev = *x;
        }
        let lambda = vec![0.5; d.len()];
        Self::new(r, d, lambda)
    }

    pub fn steps(&self) -> usize {
        self.d.len()
    }

    /// `d_n` with `d_0 = r_0`.
    pub fn d_at(&self, n: usize) -> C64 {
        if n == 0 {
            self.r[0]
        } else {
            self.d[n - 1]
        }
    }

    /// `r_n + d_{n-1} − d_n`, the entry promised on `b_n`.
    pub fn promised(&self, n: usize) -> C64 {
        self.r[n] + self.d_at(n - 1) - self.d_at(n)
    }
}

#[derive(Debug, Clone)]
pub struct BootstrapOutcome {
    /// `b_1..b_N`.
    pub b: OrthonormalBasis,
    /// The final carried vector `f_N`.
    pub f_last: Vec<C64>,
    /// `|(f_n, f_{n-1})|²` for `n = 1..=N`.
    pub overlaps: Vec<f64>,
    /// Max deviation of `(T b_n, b_n)` from `r_n + d_{n-1} − d_n` and of
    /// `(T f_N, f_N)` from `d_N`.
    pub diagonal_residual: f64,
    /// Distance between the projections onto `span{b, f_N}` and `span E`.
    pub span_residual: f64,
}

/// Runs Fan's step along `E`, carrying `f_{n-1}` against `e_n`.
pub fn bootstrap_fan(
    t: &ComplexMatrix,
    e: &OrthonormalBasis,
    plan: &BootstrapPlan,
) -> Result<BootstrapOutcome> {
    if e.len() != plan.r.len() {
        return Err(shape(format!(
            "plan has {} diagonal entries for {} vectors",
            plan.r.len(),
            e.len()
        )));
    }
    let actual = diagonal_of(t, e)?;
    let scale = 1e-10 * (1.0 + operator_norm(t));
    if let Some((n, _)) = actual
        .iter()
        .zip(&plan.r)
        .enumerate()
        .find(|(_, (a, r))| (*a - *r).norm() > scale)
    {
        return Err(domain(format!(
            "plan entry r_{n} = {} differs from the diagonal {}",
            plan.r[n], actual[n]
        )));
    }
    let sparse = t.sparse();
    let mut f = e.vector(0);
    let mut bs: Vec<Vec<C64>> = Vec::with_capacity(plan.steps());
    let mut overlaps = Vec::with_capacity(plan.steps());
    let mut residual: f64 = 0.0;
    for n in 1..=plan.steps() {
        let en = e.vector(n);
        let a = compress_pair(&sparse, &f, &en);
        // The carried endpoint is (T f_{n-1}, f_{n-1}); rounding keeps it
        // within roundoff of d_{n-1}.
        let target = SegmentTarget::new(a[(0, 0)], a[(1, 1)], plan.d_at(n))
            .map_err(|err| domain(format!("step {n}: {err}")))?;
        let (bc, fc) = fan_pair_unchecked(&a, target.lambda);
        let f_new = combine(&f, &en, &fc);
        let b = combine(&f, &en, &bc);
        overlaps.push(inner(&f_new, &f).norm_sqr());
        residual = residual.max((sparse.quadratic_form(&b) - plan.promised(n)).norm());
        bs.push(b);
        f = f_new;
    }
    residual = residual.max((sparse.quadratic_form(&f) - plan.d_at(plan.steps())).norm());
    let b = OrthonormalBasis::from_columns_unchecked(ComplexMatrix::from_columns(e.dim(), &bs)?);
    let mut all = bs;
    all.push(f.clone());
    let span_residual = span_distance(e, &all)?;
    Ok(BootstrapOutcome {
        b,
        f_last: f,
        overlaps,
        diagonal_residual: residual,
        span_residual,
    })
}

/// Compression of `T` to the ordered pair `(u, v)`: entry `(i, j)` is
/// `(T w_j, w_i)`.
fn compress_pair(t: &SparseRows, u: &[C64], v: &[C64]) -> ComplexMatrix {
    let tu = t.mul_vec(u);
    let tv = t.mul_vec(v);
    ComplexMatrix::from_fn(2, 2, |i, j| {
        let (x, y) = ([&tu, &tv][j], [u, v][i]);
        inner(x, y)
    })
}

fn combine(u: &[C64], v: &[C64], coef: &[C64]) -> Vec<C64> {
    u.iter().zip(v).map(|(x, y)| x * coef[0] + y * coef[1]).collect()
}

/// For a family `V` of `|E|` vectors: the larger of `‖C C* − I‖_max` with
/// `C = E* V` and the component of `V` outside `span E`. Both vanish
/// exactly when the projections agree.
fn span_distance(e: &OrthonormalBasis, vs: &[Vec<C64>]) -> Result<f64> {
    let v = ComplexMatrix::from_columns(e.dim(), vs)?;
    let c = e.matrix().adjoint().matmul(&v)?;
    let back = e.matrix().matmul(&c)?;
    let outside = back.sub(&v)?.max_abs();
    let k = c.rows();
    let cc = c.matmul(&c.adjoint())?;
    let gram = cc.sub(&ComplexMatrix::identity(k))?.max_abs();
    Ok(outside.max(gram))
}

/// One zero-sum block `A_k = {f_k} ∪ {f'_n : m_{k-1} < n ≤ m_k}`, with
/// 0-based pair numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroDiagGroup {
    pub f: usize,
    pub f_prime: Vec<usize>,
    /// Sum of the rotated diagonal entries before equalization.
    pub sum: C64,
}

/// Bookkeeping of the zero-diagonalization run.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroDiagPlan {
    /// Nilpotent diagonal `d_n ≥ 0`, one per pair.
    pub d: Vec<f64>,
    /// Rotation angle per pair; 0 for pairs past the last completed group.
    pub theta: Vec<f64>,
    /// Greedy boundaries `m_k` as pair counts (1-based last
    /// index of each group).
    pub m: Vec<usize>,
    pub groups: Vec<ZeroDiagGroup>,
}

#[derive(Debug, Clone)]
pub struct ZeroDiagOutcome {
    /// Full basis: the completed groups' vectors first, in group order,
    /// then the untouched remainder.
    pub basis: OrthonormalBasis,
    pub plan: ZeroDiagPlan,
    /// Number of leading basis vectors on which the diagonal is zero.
    pub processed: usize,
    /// Pairs with some vector outside every completed group.
    pub unprocessed_pairs: Vec<usize>,
}

/// Greedy group boundaries for the nilpotent diagonal `d` (pair counts).
/// Angles of non-boundary pairs are `arctan(d_n)/2`; each boundary angle is
/// solved so the group's entries sum to zero.
pub fn greedy_groups(d: &[f64]) -> Result<(Vec<usize>, Vec<f64>)> {
    let dm: Vec<f64> = d.iter().map(|x| d_minus(*x)).collect();
    let mut theta = vec![0.0; d.len()];
    let mut bounds = Vec::new();
    let mut prev = 0usize;
    while prev < d.len() {
        let k = bounds.len();
        // (D f_k, f_k): 1 + d⁻₁ for the first group, otherwise
        // 1 − (D f'_k, f'_k) with θ_k already fixed by an earlier group.
        let need = if k == 0 {
            1.0 + dm[0]
        } else {
            1.0 - rotated_lo(d[k], theta[k])
        };
        let mut acc = 0.0;
        let mut found = None;
        for n in prev..d.len() {
            if acc + dm[n] >= need {
                found = Some((n, acc));
                break;
            }
            acc += dm[n];
        }
        let Some((last, before)) = found else { break };
        for n in prev..last {
            theta[n] = min_diagonal_rotation(d[n]).theta;
        }
        theta[last] = theta_for_target(d[last], before - need)?;
        bounds.push(last + 1);
        prev = last + 1;
    }
    Ok((bounds, theta))
}

fn rotated_lo(d: f64, theta: f64) -> f64 {
    crate::numrange::rotation_diagonal(d, theta).diag_lo
}

/// Zero-diagonal basis on the completed greedy groups of an idempotent
/// given in paired form: `pairs[n] = (e_n, e'_n)` are coordinate indices
/// with `(D e_n, e_n) = 1`, `(D e'_n, e'_n) = 0` and nilpotent diagonal
/// `d_n = (D e_n, e'_n) ≥ 0`.
pub fn zero_diagonalize_idempotent(
    dmat: &ComplexMatrix,
    pairs: &[(usize, usize)],
) -> Result<ZeroDiagOutcome> {
    let dim = dmat.rows();
    if !dmat.is_square() || dim != 2 * pairs.len() {
        return Err(shape(format!(
            "{} pairs do not cover a {}x{} matrix",
            pairs.len(),
            dmat.rows(),
            dmat.cols()
        )));
    }
    let mut seen = vec![false; dim];
    for &(a, b) in pairs {
        if a >= dim || b >= dim || seen[a] || seen[b] || a == b {
            return Err(shape("pairs must partition the coordinates"));
        }
        seen[a] = true;
        seen[b] = true;
    }
    let norm = operator_norm(dmat);
    let idem = idempotency_residual(dmat)?;
    if idem > tol::IDEMPOTENT * (1.0 + norm * norm) {
        return Err(Error::Precondition {
            what: "matrix is not idempotent".into(),
            residual: idem,
        });
    }
    let slack = 1e-9 * (1.0 + norm);
    let mut d = Vec::with_capacity(pairs.len());
    for (n, &(a, b)) in pairs.iter().enumerate() {
        let top = (dmat[(a, a)] - C64::new(1.0, 0.0)).norm();
        let bottom = dmat[(b, b)].norm();
        let dn = dmat[(b, a)];
        if top > slack || bottom > slack {
            return Err(Error::Precondition {
                what: format!("pair {n} is not in paired form"),
                residual: top.max(bottom),
            });
        }
        if dn.im.abs() > slack || dn.re < -slack {
            return Err(Error::Precondition {
                what: format!("nilpotent entry {n} is not real and nonnegative; phase-normalize first"),
                residual: dn.im.abs().max(-dn.re),
            });
        }
        d.push(dn.re.max(0.0));
    }
    let (m, theta) = greedy_groups(&d)?;
    // Rotated pair vectors in ambient coordinates.
    let unit = |i: usize| {
        let mut v = vec![ZERO; dim];
        v[i] = C64::new(1.0, 0.0);
        v
    };
    let rotated = |n: usize, primed: bool| -> Vec<C64> {
        let (a, b) = pairs[n];
        let (c, s) = (math::cos(theta[n]), math::sin(theta[n]));
        let mut v = vec![ZERO; dim];
        if primed {
            v[a] = C64::new(-s, 0.0);
            v[b] = C64::new(c, 0.0);
        } else {
            v[a] = C64::new(c, 0.0);
            v[b] = C64::new(s, 0.0);
        }
        v
    };
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(dim);
    let mut groups = Vec::with_capacity(m.len());
    let mut prev = 0;
    let sparse = dmat.sparse();
    for (k, &mk) in m.iter().enumerate() {
        let mut family = vec![rotated(k, false)];
        family.extend((prev..mk).map(|n| rotated(n, true)));
        let sum: C64 = family.iter().map(|v| sparse.quadratic_form(v)).sum();
        let fam = OrthonormalBasis::from_columns_unchecked(ComplexMatrix::from_columns(dim, &family)?);
        let idx: Vec<usize> = (0..family.len()).collect();
        let equal = constant_diagonal_rebasis(dmat, &fam, &idx)?;
        columns.extend(equal.vectors());
        groups.push(ZeroDiagGroup {
            f: k,
            f_prime: (prev..mk).collect(),
            sum,
        });
        prev = mk;
    }
    let processed = columns.len();
    let g = m.len();
    let mut unprocessed = Vec::new();
    for n in 0..pairs.len() {
        let f_done = n < g;
        let fp_done = n < prev;
        match (f_done, fp_done) {
            (true, true) => {}
            (false, true) => columns.push(rotated(n, false)),
            (true, false) => columns.push(rotated(n, true)),
            (false, false) => {
                columns.push(unit(pairs[n].0));
                columns.push(unit(pairs[n].1));
            }
        }
        if !(f_done && fp_done) {
            unprocessed.push(n);
        }
    }
    let basis = OrthonormalBasis::from_columns_unchecked(ComplexMatrix::from_columns(dim, &columns)?);
    let mut theta = theta;
    for t in theta.iter_mut().skip(prev) {
        *t = 0.0;
    }
    Ok(ZeroDiagOutcome {
        basis,
        plan: ZeroDiagPlan {
            d,
            theta,
            m,
            groups,
        },
        processed,
        unprocessed_pairs: unprocessed,
    })
}

/// Rotates the phases of the `e'_n` coordinates so every nilpotent
/// diagonal entry `(D e_n, e'_n)` becomes `|d_n|`. Returns `B* D B` and the
/// basis `B = I ⊕ diag(d_n/|d_n|)`.
pub fn phase_normalize(
    dmat: &ComplexMatrix,
    pairs: &[(usize, usize)],
) -> Result<(ComplexMatrix, OrthonormalBasis)> {
    let dim = dmat.rows();
    if !dmat.is_square() || pairs.iter().any(|&(a, b)| a >= dim || b >= dim) {
        return Err(shape("pairs must index a square matrix"));
    }
    let mut b = ComplexMatrix::identity(dim);
    for &(a, p) in pairs {
        let dn = dmat[(p, a)];
        if dn.norm() > 0.0 {
            b[(p, p)] = dn / dn.norm();
        }
    }
    let basis = OrthonormalBasis::from_columns_unchecked(b);
    let conj = crate::linalg::change_of_basis(dmat, &basis)?;
    Ok((conj, basis))
}

/// Partial sums `s_n = Σ_{j ≤ n} d_j` of a diagonal, a selected subsequence
/// `n_k` (1-based counts) and the limit, with `|s_{n_k} − limit| ≤ 2^{-k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSumTrace {
    pub s: Vec<C64>,
    pub n_k: Vec<usize>,
    pub limit: C64,
}

impl PartialSumTrace {
    pub fn new(s: Vec<C64>, n_k: Vec<usize>, limit: C64) -> Result<Self> {
        let mut prev = 0;
        for (k, &n) in n_k.iter().enumerate() {
            if n <= prev {
                return Err(domain("n_k must be strictly increasing and positive"));
            }
            prev = n;
            if n > s.len() {
                // Beyond the sampled prefix: kept for truncation reporting.
                continue;
            }
            let gap = (s[n - 1] - limit).norm();
            let bound = math::pow2(-((k + 1) as i32));
            if gap > bound + 1e-12 {
                return Err(domain(format!(
                    "|s_{n} - limit| = {gap:.3e} exceeds 2^-{}",
                    k + 1
                )));
            }
        }
        Ok(PartialSumTrace { s, n_k, limit })
    }

    pub fn from_diagonal(diag: &[C64], n_k: Vec<usize>, limit: C64) -> Result<Self> {
        Self::new(partial_sums(diag), n_k, limit)
    }

    /// Greedy selection: for each `k` the first `n > n_{k-1}` with
    /// `|s_n − limit| ≤ 2^{-k}`, as far as the prefix allows.
    pub fn derive(diag: &[C64], limit: C64) -> Self {
        let s = partial_sums(diag);
        let mut n_k = Vec::new();
        let mut start = 0;
        loop {
            let bound = math::pow2(-((n_k.len() + 1) as i32));
            match (start..s.len()).find(|&i| (s[i] - limit).norm() <= bound) {
                Some(i) => {
                    n_k.push(i + 1);
                    start = i + 1;
                }
                None => break,
            }
        }
        PartialSumTrace { s, n_k, limit }
    }

    pub fn s_at(&self, n: usize) -> C64 {
        if n == 0 {
            ZERO
        } else {
            self.s[n - 1]
        }
    }
}

fn partial_sums(diag: &[C64]) -> Vec<C64> {
    let mut acc = ZERO;
    diag.iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct AbsSumOutcome {
    /// Replacement for `E`: complete segments equalized, the rest unchanged.
    pub basis: OrthonormalBasis,
    /// Number of leading vectors covered by complete segments.
    pub processed: usize,
    /// Segments `(n_k, n_{k+1}]` as 0-based half-open ranges.
    pub segments: Vec<(usize, usize)>,
    /// `Σ |diag|` over the processed vectors.
    pub absolute_sum: f64,
    /// `|s_{n_1}| + 3/2`.
    pub bound: f64,
    /// Indices `n_k` that did not fit.
    pub truncated: Vec<usize>,
}

/// Makes the diagonal constant on each segment `(n_k, n_{k+1}]`
/// (`n_0 = 0`), which turns a summable diagonal into an absolutely summable
/// one.
pub fn absolutely_summable_rebasis(
    t: &ComplexMatrix,
    e: &OrthonormalBasis,
    info: &PartialSumTrace,
) -> Result<AbsSumOutcome> {
    let diag = diagonal_of(t, e)?;
    let scale = 1e-9 * (1.0 + operator_norm(t));
    let sums = partial_sums(&diag);
    for (n, (a, b)) in sums.iter().zip(&info.s).enumerate() {
        if (a - b).norm() > scale * (n + 1) as f64 {
            return Err(domain(format!(
                "partial sum s_{} = {b} disagrees with the diagonal ({a})",
                n + 1
            )));
        }
    }
    let k = e.len();
    let mut cuts = vec![0usize];
    let mut truncated = Vec::new();
    for &n in &info.n_k {
        if n <= k {
            cuts.push(n);
        } else {
            truncated.push(n);
        }
    }
    let mut columns = e.matrix().clone();
    let mut segments = Vec::new();
    for w in cuts.windows(2) {
        let idx: Vec<usize> = (w[0]..w[1]).collect();
        let equal = constant_diagonal_rebasis(t, e, &idx)?;
        for (j, col) in idx.iter().zip(equal.vectors()) {
            columns.set_column(*j, &col);
        }
        segments.push((w[0], w[1]));
    }
    let processed = *cuts.last().unwrap_or(&0);
    let basis = OrthonormalBasis::from_columns_unchecked(columns);
    let new_diag = diagonal_of(t, &basis)?;
    let absolute_sum = new_diag[..processed].iter().map(|z| z.norm()).sum();
    let bound = info.n_k.first().map_or(1.5, |&n1| {
        if n1 <= k {
            info.s_at(n1).norm() + 1.5
        } else {
            1.5
        }
    });
    Ok(AbsSumOutcome {
        basis,
        processed,
        segments,
        absolute_sum,
        bound,
        truncated,
    })
}
