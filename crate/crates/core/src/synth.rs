//! Idempotents with prescribed diagonals.
//!
//! Infinite constructions are built on exact finite truncations: every
//! result lists the realized diagonal, how many leading entries match the
//! request (`processed`) and what the remaining basis vectors are for.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, shape, Error, Result};
use crate::linalg::{
    numerical_rank, Certificate, ComplexMatrix, OrthonormalBasis, C64, ONE, ZERO,
};
use crate::numrange::constant_diagonal_rebasis;
use crate::rebase::{bootstrap_fan, BootstrapPlan};
use crate::{math, tol};

/// What a basis vector of a synthesis result stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// Carries a requested diagonal entry.
    Requested,
    /// Carries the repeated value of an infinite-multiplicity construction.
    Fill,
    /// Balances the trace at the truncation edge.
    Boundary,
    /// Zero entries past the end of a finite (ℓ¹) request.
    Tail,
}

/// An idempotent, the basis realizing the diagonal, and its certificate.
#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub matrix: ComplexMatrix,
    /// Full unitary basis; the processed vectors come first, in request
    /// order.
    pub basis: OrthonormalBasis,
    pub processed: usize,
    /// Diagonal of `matrix` in `basis`.
    pub realized: Vec<C64>,
    pub roles: Vec<Role>,
    pub certificate: Certificate,
}

impl SynthesisResult {
    fn assemble(
        matrix: ComplexMatrix,
        basis: OrthonormalBasis,
        targets: &[C64],
        roles: Vec<Role>,
        norm_bound: Option<f64>,
    ) -> Result<Self> {
        debug_assert_eq!(roles.len(), basis.len());
        let (realized, certificate) = Certificate::measure(&matrix, &basis, targets, norm_bound)?;
        Ok(SynthesisResult {
            matrix,
            basis,
            processed: targets.len(),
            realized,
            roles,
            certificate,
        })
    }

    /// Numerical rank of the idempotent.
    pub fn rank(&self) -> usize {
        numerical_rank(&self.matrix, tol::RANK)
    }
}

/// `[[1, 0], [z, 0]]`.
pub fn idem_2x2_nilpotent(z: C64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 0)] = ONE;
    m[(1, 0)] = z;
    m
}

/// The nilpotent 2×2 idempotent with `z = 6d − 3`, turned by a quarter
/// rotation so its diagonal reads `(3d − 1, 2 − 3d)`.
fn two_by_two(d: C64) -> ComplexMatrix {
    let z = d * 6.0 - 3.0;
    let p = (z + 1.0) * 0.5;
    let q = (z - 1.0) * 0.5;
    ComplexMatrix::new(2, 2, vec![p, -p, q, -q]).expect("finite entries")
}

/// 2×2 idempotent with diagonal `(3d − 1, −3d + 2)` and norm at most
/// `6|d| + 4`.
pub fn idem_2x2_diag(d: C64) -> Result<SynthesisResult> {
    finite(&[d])?;
    let m = two_by_two(d);
    SynthesisResult::assemble(
        m,
        OrthonormalBasis::standard(2),
        &[d * 3.0 - 1.0, C64::new(2.0, 0.0) - d * 3.0],
        vec![Role::Requested; 2],
        Some(6.0 * d.norm() + 4.0),
    )
}

fn finite(values: &[C64]) -> Result<()> {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(domain("diagonal values must be finite"))
    }
}

/// A block-diagonal piece with its own local basis, processed vectors
/// first.
struct Section {
    matrix: ComplexMatrix,
    vectors: Vec<Vec<C64>>,
    processed: usize,
}

/// `K` copies of the 2×2 block; each pair of blocks contributes the triple
/// `(3d−1, 3d−1, 2−3d)`, which is rebased to constant `d`.
fn constant_section(d: C64, k: usize) -> Result<Section> {
    let block = two_by_two(d);
    let blocks: Vec<&ComplexMatrix> = vec![&block; k];
    let matrix = ComplexMatrix::direct_sum(&blocks);
    let dim = 2 * k;
    let unit = |i: usize| {
        let mut v = vec![ZERO; dim];
        v[i] = ONE;
        v
    };
    if block[(0, 0)] == block[(1, 1)] {
        return Ok(Section {
            matrix,
            vectors: (0..dim).map(unit).collect(),
            processed: dim,
        });
    }
    let pair = ComplexMatrix::direct_sum(&[&block, &block]);
    // Coordinates 0 and 2 hold 3d−1, coordinate 1 holds 2−3d.
    let triple = constant_diagonal_rebasis(&pair, &OrthonormalBasis::standard(4), &[0, 2, 1])?
        .vectors();
    let mut vectors = Vec::with_capacity(dim);
    let mut leftover = Vec::new();
    for t in 0..k / 2 {
        for v in &triple {
            let mut w = vec![ZERO; dim];
            w[4 * t..4 * t + 4].copy_from_slice(v);
            vectors.push(w);
        }
        leftover.push(unit(4 * t + 3));
    }
    if k % 2 == 1 {
        leftover.push(unit(dim - 2));
        leftover.push(unit(dim - 1));
    }
    let processed = vectors.len();
    vectors.extend(leftover);
    Ok(Section {
        matrix,
        vectors,
        processed,
    })
}

/// Direct sum of `K` copies of the 2×2 block, rebased to constant diagonal
/// `d` on every complete triple.
pub fn idem_constant_diag(d: C64, k: usize) -> Result<SynthesisResult> {
    finite(&[d])?;
    if k < 3 {
        return Err(domain(format!("need at least 3 blocks, got {k}")));
    }
    let s = constant_section(d, k)?;
    let mut roles = vec![Role::Requested; s.processed];
    roles.resize(s.vectors.len(), Role::Boundary);
    let basis = OrthonormalBasis::from_columns_unchecked(ComplexMatrix::from_columns(2 * k, &s.vectors)?);
    SynthesisResult::assemble(
        s.matrix,
        basis,
        &vec![d; s.processed],
        roles,
        Some(6.0 * d.norm() + 4.0),
    )
}

/// Columns of a direct sum of sections, grouped by role.
struct Assembly {
    offsets: Vec<usize>,
    dim: usize,
}

impl Assembly {
    fn new(sizes: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut acc = 0;
        for s in sizes {
            offsets.push(acc);
            acc += s;
        }
        Assembly { offsets, dim: acc }
    }

    fn place(&self, section: usize, v: &[C64]) -> Vec<C64> {
        let mut w = vec![ZERO; self.dim];
        let o = self.offsets[section];
        w[o..o + v.len()].copy_from_slice(v);
        w
    }
}

/// Output of the infinite-multiplicity construction before certification.
struct MultiplicityParts {
    matrix: ComplexMatrix,
    /// `f_j` per requested value.
    requested: Vec<Vec<C64>>,
    fill: Vec<Vec<C64>>,
    boundary: Vec<Vec<C64>>,
}

fn multiplicity_parts(d: &[C64], m_idx: usize, depth: usize) -> Result<MultiplicityParts> {
    if d.is_empty() {
        return Err(domain("empty diagonal request"));
    }
    finite(d)?;
    if m_idx >= d.len() {
        return Err(shape(format!("repeated index {m_idx} out of range 0..{}", d.len())));
    }
    if depth < 3 {
        return Err(domain(format!("need at least 3 blocks per section, got {depth}")));
    }
    let dm = d[m_idx];
    let mut mats = Vec::with_capacity(2 * d.len());
    let mut requested = Vec::new();
    let mut fill = Vec::new();
    let mut boundary = Vec::new();
    let sizes = vec![4 * depth; d.len()];
    let asm = Assembly::new(&sizes);
    for (j, dj) in d.iter().enumerate() {
        let a = constant_section(*dj, depth)?;
        let b = constant_section(dm * 2.0 - dj, depth)?;
        let local = ComplexMatrix::direct_sum(&[&a.matrix, &b.matrix]);
        let n = 2 * depth;
        let lift_a = |v: &Vec<C64>| {
            let mut w = v.clone();
            w.resize(2 * n, ZERO);
            w
        };
        let lift_b = |v: &Vec<C64>| {
            let mut w = vec![ZERO; n];
            w.extend_from_slice(v);
            w
        };
        requested.push(asm.place(j, &lift_a(&a.vectors[0])));
        let pairs = (a.processed.saturating_sub(1)).min(b.processed);
        for k in 0..pairs {
            let fam = OrthonormalBasis::from_columns_unchecked(ComplexMatrix::from_columns(
                2 * n,
                &[lift_a(&a.vectors[k + 1]), lift_b(&b.vectors[k])],
            )?);
            let even = constant_diagonal_rebasis(&local, &fam, &[0, 1])?;
            fill.extend(even.vectors().iter().map(|v| asm.place(j, v)));
        }
        for v in &a.vectors[1 + pairs..] {
            boundary.push(asm.place(j, &lift_a(v)));
        }
        for v in &b.vectors[pairs..] {
            boundary.push(asm.place(j, &lift_b(v)));
        }
        mats.push(local);
    }
    let refs: Vec<&ComplexMatrix> = mats.iter().collect();
    Ok(MultiplicityParts {
        matrix: ComplexMatrix::direct_sum(&refs),
        requested,
        fill,
        boundary,
    })
}

fn sup_norm(d: &[C64]) -> f64 {
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Truncation of `⊕_j (D_{d_j} ⊕ D_{2d_m − d_j})` with `depth` blocks per
/// constant-diagonal section. Each `d_j` appears once; paired leftovers are
/// averaged to the repeated value `d[m_idx]` and labeled fill.
pub fn idem_infinite_multiplicity(d: &[C64], m_idx: usize, depth: usize) -> Result<SynthesisResult> {
    let parts = multiplicity_parts(d, m_idx, depth)?;
    let mut roles = vec![Role::Requested; parts.requested.len()];
    roles.extend(vec![Role::Fill; parts.fill.len()]);
    roles.extend(vec![Role::Boundary; parts.boundary.len()]);
    let dim = parts.matrix.rows();
    let mut cols = parts.requested;
    cols.extend(parts.fill);
    cols.extend(parts.boundary);
    let basis = OrthonormalBasis::from_columns_unchecked(ComplexMatrix::from_columns(dim, &cols)?);
    SynthesisResult::assemble(parts.matrix, basis, d, roles, Some(18.0 * sup_norm(d) + 4.0))
}

/// Bounded-sequence synthesis on a finite prefix.
///
/// The request is dealt round-robin into `partition` chains. Chain `j`
/// with values `d_{j,1..N}` contributes the entries `0, 2d_{j,n} − d_{j,n−1}`
/// to an infinite-multiplicity construction around the value 0; a
/// bootstrapped Fan run with all coefficients 1/2 then moves each chain onto
/// its targets.
pub fn idem_bounded_diag(d: &[C64], partition: usize, depth: usize) -> Result<SynthesisResult> {
    if partition == 0 {
        return Err(domain("partition width must be positive"));
    }
    if d.is_empty() {
        return Err(domain("empty diagonal request"));
    }
    finite(d)?;
    let chains: Vec<Vec<usize>> = (0..partition)
        .map(|j| (j..d.len()).step_by(partition).collect())
        .collect();
    let mut r = Vec::new();
    let mut starts = Vec::new();
    for chain in &chains {
        starts.push(r.len());
        r.push(ZERO);
        let mut prev = ZERO;
        for &i in chain {
            r.push(d[i] * 2.0 - prev);
            prev = d[i];
        }
    }
    let parts = multiplicity_parts(&r, 0, depth)?;
    let dim = parts.matrix.rows();
    let mut requested: Vec<Option<Vec<C64>>> = vec![None; d.len()];
    let mut fill = parts.fill;
    let mut boundary = Vec::new();
    for (j, chain) in chains.iter().enumerate() {
        let s = starts[j];
        if chain.is_empty() {
            fill.push(parts.requested[s].clone());
            continue;
        }
        let e = OrthonormalBasis::from_columns_unchecked(ComplexMatrix::from_columns(
            dim,
            &parts.requested[s..s + chain.len() + 1],
        )?);
        let targets: Vec<C64> = chain.iter().map(|&i| d[i]).collect();
        let plan = BootstrapPlan::halving(ZERO, targets)?;
        let out = bootstrap_fan(&parts.matrix, &e, &plan)?;
        for (n, &i) in chain.iter().enumerate() {
            requested[i] = Some(out.b.vector(n));
        }
        boundary.push(out.f_last);
    }
    boundary.extend(parts.boundary);
    let mut cols: Vec<Vec<C64>> = requested.into_iter().map(|v| v.expect("every index lies in a chain")).collect();
    let mut roles = vec![Role::Requested; cols.len()];
    roles.extend(vec![Role::Fill; fill.len()]);
    roles.extend(vec![Role::Boundary; boundary.len()]);
    cols.extend(fill);
    cols.extend(boundary);
    let basis = OrthonormalBasis::from_columns_unchecked(ComplexMatrix::from_columns(dim, &cols)?);
    SynthesisResult::assemble(parts.matrix, basis, d, roles, Some(18.0 * sup_norm(d) + 4.0))
}

/// Principal square root with argument in `(−π, π]`.
pub fn principal_sqrt(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        return ZERO;
    }
    let mut theta = math::atan2(z.im, z.re);
    if theta <= -core::f64::consts::PI {
        theta = core::f64::consts::PI;
    }
    let s = math::sqrt(r);
    C64::new(s * math::cos(theta / 2.0), s * math::sin(theta / 2.0))
}

/// Bilinear outer product `√d ⊗ √d` (no conjugation). Its diagonal is `d`
/// and its square is `(Σd)` times itself.
pub fn rank_one_outer(d: &[C64]) -> ComplexMatrix {
    let s: Vec<C64> = d.iter().map(|z| principal_sqrt(*z)).collect();
    ComplexMatrix::from_fn(d.len(), d.len(), |i, j| s[i] * s[j])
}

fn sum_tolerance(d: &[C64]) -> f64 {
    1e-10 * d.iter().map(|z| z.norm()).sum::<f64>().max(1.0)
}

/// Rank-one idempotent with diagonal `d`; requires `Σd = 1`.
pub fn idem_rank_one(d: &[C64]) -> Result<SynthesisResult> {
    finite(d)?;
    let s: C64 = d.iter().sum();
    if d.is_empty() || (s - ONE).norm() > sum_tolerance(d) {
        return Err(domain(format!("rank-one diagonal must sum to 1, got {s}")));
    }
    let n = d.len();
    SynthesisResult::assemble(
        rank_one_outer(d),
        OrthonormalBasis::standard(n),
        d,
        vec![Role::Requested; n],
        None,
    )
}

/// Rounds `Σd` to an integer if it is one within tolerance.
fn integer_sum(d: &[C64]) -> Option<i64> {
    let s: C64 = d.iter().sum();
    let m = math::round(s.re);
    let tol = sum_tolerance(d);
    if (s - C64::new(m, 0.0)).norm() <= tol {
        Some(m as i64)
    } else {
        None
    }
}

/// Finite matrix diagonals: all zeros, all ones, or an integer sum in
/// `{1, …, n−1}`. Built by the pair-reduction induction with a 2×2
/// similarity per step; doubles as the feasibility decider.
pub fn idem_matrix_exact(d: &[C64]) -> Result<SynthesisResult> {
    finite(d)?;
    let n = d.len();
    if n == 0 {
        return Err(Error::Infeasible("empty diagonal".into()));
    }
    let eps = 1e-10;
    let (matrix, cond) = if d.iter().all(|z| z.norm() <= eps) {
        (ComplexMatrix::zeros(n, n), None)
    } else if d.iter().all(|z| (z - ONE).norm() <= eps) {
        (ComplexMatrix::identity(n), None)
    } else {
        let m = match integer_sum(d) {
            Some(m) if m >= 1 && (m as usize) < n => m as usize,
            _ => {
                let s: C64 = d.iter().sum();
                return Err(Error::Infeasible(format!(
                    "diagonal of length {n} sums to {s}, not an integer in 1..={}",
                    n - 1
                )));
            }
        };
        let mut cond = None;
        let mat = gkl(d, m, &mut cond)?;
        (mat, cond)
    };
    let mut res = SynthesisResult::assemble(
        matrix,
        OrthonormalBasis::standard(n),
        d,
        vec![Role::Requested; n],
        None,
    )?;
    res.certificate.similarity_condition = cond;
    Ok(res)
}

/// The induction on the sum: reduce a pair `(d_i, d_j)` to
/// `d_i + d_j − 1`, recurse, prepend a 1, and conjugate by
/// `S = [[λ, λ−1], [1, 1]]`.
fn gkl(d: &[C64], m: usize, cond: &mut Option<f64>) -> Result<ComplexMatrix> {
    let n = d.len();
    if m == 1 {
        return Ok(rank_one_outer(d));
    }
    let (i, j, gap) = pick_pair(d);
    if gap == 0.0 {
        return Err(Error::Infeasible("every pair of entries sums to 2".into()));
    }
    let mut order = vec![i, j];
    order.extend((0..n).filter(|&k| k != i && k != j));
    let mut reduced = vec![d[i] + d[j] - 1.0];
    reduced.extend(order[2..].iter().map(|&k| d[k]));
    let inner = gkl(&reduced, m - 1, cond)?;
    let mut x = ComplexMatrix::direct_sum(&[&ComplexMatrix::identity(1), &inner]);
    let lambda = (d[j] - 1.0) / (d[i] + d[j] - 2.0);
    // S on rows 0, 1.
    for c in 0..n {
        let (a, b) = (x[(0, c)], x[(1, c)]);
        x[(0, c)] = lambda * a + (lambda - 1.0) * b;
        x[(1, c)] = a + b;
    }
    // S⁻¹ = [[1, 1−λ], [−1, λ]] on columns 0, 1.
    for rr in 0..n {
        let (a, b) = (x[(rr, 0)], x[(rr, 1)]);
        x[(rr, 0)] = a - b;
        x[(rr, 1)] = (ONE - lambda) * a + lambda * b;
    }
    if gap < 1e-3 {
        let s = ComplexMatrix::new(2, 2, vec![lambda, lambda - 1.0, ONE, ONE])?;
        let c = crate::linalg::condition_number(&s)?;
        *cond = Some(cond.map_or(c, |old: f64| old.max(c)));
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            out[(order[a], order[b])] = x[(a, b)];
        }
    }
    Ok(out)
}

/// Pair with `d_i + d_j` far from 2: the best adjacent pair when its gap is
/// at least 1e-3, otherwise the best pair overall.
fn pick_pair(d: &[C64]) -> (usize, usize, f64) {
    let gap = |i: usize, j: usize| (d[i] + d[j] - 2.0).norm();
    let best_adjacent = (0..d.len().saturating_sub(1))
        .map(|i| (i, i + 1, gap(i, i + 1)))
        .fold((0, 1, -1.0), |a, b| if b.2 > a.2 { b } else { a });
    if best_adjacent.2 >= 1e-3 {
        return best_adjacent;
    }
    let mut best = best_adjacent;
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = gap(i, j);
            if g > best.2 {
                best = (i, j, g);
            }
        }
    }
    best
}

/// Construction route for finite-rank synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Matrix block plus rank-one block, then a halving bootstrap.
    Fan,
    /// Induction on the sum with the 2×2 similarity.
    Gkl,
}

/// Finite-rank idempotent with diagonal `d` (then zeros); requires
/// `Σd = m` with `m` a positive integer. The result has rank `m`.
pub fn idem_finite_rank(d: &[C64], route: Route) -> Result<SynthesisResult> {
    finite(d)?;
    let m = match integer_sum(d) {
        Some(m) if m >= 1 => m as usize,
        _ => {
            let s: C64 = d.iter().sum();
            return Err(Error::Infeasible(format!(
                "finite-rank diagonal must sum to a positive integer, got {s}"
            )));
        }
    };
    if m == 1 {
        return idem_rank_one(d);
    }
    match route {
        Route::Gkl => finite_rank_gkl(d, m),
        Route::Fan => finite_rank_fan(d, m),
    }
}

fn with_tail(n: usize, total: usize) -> Vec<Role> {
    let mut roles = vec![Role::Requested; n];
    roles.resize(total, Role::Tail);
    roles
}

fn finite_rank_gkl(d: &[C64], m: usize) -> Result<SynthesisResult> {
    let n = d.len().max(m + 1);
    let mut padded = d.to_vec();
    padded.resize(n, ZERO);
    let mut cond = None;
    let mat = gkl(&padded, m, &mut cond)?;
    let mut res = SynthesisResult::assemble(
        mat,
        OrthonormalBasis::standard(n),
        d,
        with_tail(d.len(), n),
        None,
    )?;
    res.certificate.similarity_condition = cond;
    Ok(res)
}

fn finite_rank_fan(d: &[C64], m: usize) -> Result<SynthesisResult> {
    let np = d.len().max(m);
    let mut x = d.to_vec();
    x.resize(np, ZERO);
    // d'_m = (m − 1) − Σ_{n<m} d_n, 1-based.
    let head_sum: C64 = x[..m - 1].iter().sum();
    let dpm = C64::new((m - 1) as f64, 0.0) - head_sum;
    let mut first = x[..m - 1].to_vec();
    first.push(dpm);
    let mut cond = None;
    let d1 = gkl(&first, m - 1, &mut cond)?;
    let mut second = vec![x[m - 1] * 2.0 - dpm];
    for k in m..np {
        second.push(x[k] * 2.0 - x[k - 1]);
    }
    second.push(-x[np - 1]);
    let d2 = rank_one_outer(&second);
    let mat = ComplexMatrix::direct_sum(&[&d1, &d2]);
    let dim = mat.rows();
    // Bootstrap on e_{m−1}, …, e_{dim−1} (0-based) with halving steps
    // towards d_m, …, d_{n'}, 0.
    let e_idx: Vec<usize> = (m - 1..dim).collect();
    let e = OrthonormalBasis::standard_subset(dim, &e_idx)?;
    let mut targets = x[m - 1..].to_vec();
    targets.push(ZERO);
    let plan = BootstrapPlan::halving(dpm, targets)?;
    let out = bootstrap_fan(&mat, &e, &plan)?;
    let mut cols: Vec<Vec<C64>> = (0..m - 1)
        .map(|i| {
            let mut v = vec![ZERO; dim];
            v[i] = ONE;
            v
        })
        .collect();
    cols.extend(out.b.vectors());
    cols.push(out.f_last);
    let basis = OrthonormalBasis::from_columns_unchecked(ComplexMatrix::from_columns(dim, &cols)?);
    let mut res = SynthesisResult::assemble(mat, basis, d, with_tail(d.len(), dim), None)?;
    res.certificate.similarity_condition = cond;
    Ok(res)
}

/// Which existence result a request relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RequestKind {
    Bounded,
    AbsSummableSumOne,
    AbsSummableIntegerSum,
    MatrixExact,
}

/// Truncation knobs; unset fields take the defaults below.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Truncation {
    pub blocks: Option<usize>,
    pub partition: Option<usize>,
    pub depth: Option<usize>,
}

pub const DEFAULT_PARTITION: usize = 4;
pub const DEFAULT_DEPTH: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalRequest {
    pub values: Vec<C64>,
    pub kind: RequestKind,
    pub truncation: Truncation,
}

impl DiagonalRequest {
    /// Checks the sum condition attached to `kind`.
    pub fn validate(&self) -> Result<()> {
        finite(&self.values)?;
        let s: C64 = self.values.iter().sum();
        match self.kind {
            RequestKind::Bounded => Ok(()),
            RequestKind::AbsSummableSumOne => {
                if (s - ONE).norm() <= sum_tolerance(&self.values) {
                    Ok(())
                } else {
                    Err(Error::Infeasible(format!("sum {s} is not 1")))
                }
            }
            RequestKind::AbsSummableIntegerSum => match integer_sum(&self.values) {
                Some(m) if m >= 1 => Ok(()),
                _ => Err(Error::Infeasible(format!("sum {s} is not a positive integer"))),
            },
            RequestKind::MatrixExact => {
                let n = self.values.len();
                let zeros = self.values.iter().all(|z| z.norm() <= 1e-10);
                let ones = self.values.iter().all(|z| (z - ONE).norm() <= 1e-10);
                let mid = matches!(integer_sum(&self.values), Some(m) if m >= 1 && (m as usize) < n);
                if n > 0 && (zeros || ones || mid) {
                    Ok(())
                } else {
                    Err(Error::Infeasible(format!("sum {s} violates the matrix trichotomy")))
                }
            }
        }
    }

    pub fn synthesize(&self) -> Result<SynthesisResult> {
        self.validate()?;
        let t = self.truncation;
        match self.kind {
            RequestKind::Bounded => idem_bounded_diag(
                &self.values,
                t.partition.unwrap_or(DEFAULT_PARTITION),
                t.depth.unwrap_or(DEFAULT_DEPTH),
            ),
            RequestKind::AbsSummableSumOne => idem_rank_one(&self.values),
            RequestKind::AbsSummableIntegerSum => idem_finite_rank(&self.values, Route::Fan),
            RequestKind::MatrixExact => idem_matrix_exact(&self.values),
        }
    }
}
