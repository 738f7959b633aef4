//! Canonical form of idempotents and the feasibility / shape deciders.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::linalg::{
    compress, idempotency_residual, operator_norm, svd, ComplexMatrix, OrthonormalBasis, C64,
    ONE,
};
use crate::{math, tol};

/// `D` in the coordinates `ker⊥D ⊕ ker D`, refined by the nilpotent part.
#[derive(Debug, Clone)]
pub struct CanonicalDecomposition {
    pub ker_dim: usize,
    /// `dim ker⊥D`, which is the rank.
    pub coker_dim: usize,
    /// Nilpotent part: `ker_dim × coker_dim`, from `ker⊥D` to `ker D`.
    pub t: ComplexMatrix,
    /// `D` over `ker T ⊕ range⊥T ⊕ ker⊥T ⊕ range T`.
    pub four_block: ComplexMatrix,
    /// `|T̃|` on `ker⊥T`.
    pub t_polar: ComplexMatrix,
    /// `[ker⊥D | ker D]`; `D = V [[I,0],[T,0]] V*`.
    pub split: OrthonormalBasis,
    /// Basis of the four-block form. The `range T` vectors are matched to
    /// the `ker⊥T` vectors by the polar factor, so `T̃ = |T̃|` there.
    pub fine: OrthonormalBasis,
    /// Dimensions of `ker T`, `range⊥T`, `ker⊥T` (= `range T`).
    pub blocks: [usize; 3],
}

impl CanonicalDecomposition {
    /// `split · [[I,0],[T,0]] · split*`.
    pub fn reassemble(&self) -> ComplexMatrix {
        let n = self.ker_dim + self.coker_dim;
        let r = self.coker_dim;
        let mut core = ComplexMatrix::zeros(n, n);
        for i in 0..r {
            core[(i, i)] = ONE;
        }
        for i in 0..self.ker_dim {
            for j in 0..r {
                core[(r + i, j)] = self.t[(i, j)];
            }
        }
        let v = self.split.matrix();
        v.matmul(&core)
            .and_then(|x| x.matmul(&v.adjoint()))
            .expect("square shapes")
    }

    /// `‖D − reassemble()‖_max`.
    pub fn reassembly_residual(&self, d: &ComplexMatrix) -> f64 {
        d.sub(&self.reassemble()).map(|x| x.max_abs()).unwrap_or(f64::INFINITY)
    }
}

fn require_idempotent(d: &ComplexMatrix) -> Result<f64> {
    if !d.is_square() {
        return Err(crate::error::shape("idempotent must be square"));
    }
    let norm = operator_norm(d);
    let idem = idempotency_residual(d)?;
    if idem > tol::IDEMPOTENT * (1.0 + norm * norm) {
        return Err(Error::Precondition {
            what: "matrix is not idempotent".into(),
            residual: idem,
        });
    }
    Ok(norm)
}

fn columns_of(m: &ComplexMatrix, idx: core::ops::Range<usize>) -> Vec<Vec<C64>> {
    idx.map(|j| m.column(j)).collect()
}

/// Splits `D` over `ker⊥D ⊕ ker D` and then over the kernel and range of
/// its nilpotent part. Kernels come from the one-sided Jacobi SVD with
/// threshold `1e-9·‖D‖`.
pub fn canonical_decomposition(d: &ComplexMatrix) -> Result<CanonicalDecomposition> {
    let norm = require_idempotent(d)?;
    let n = d.rows();
    let dec = svd(d);
    let cut = tol::RANK * norm.max(f64::MIN_POSITIVE);
    let r = dec.singular_values.iter().filter(|&&s| s > cut).count();
    let split = OrthonormalBasis::from_columns_unchecked(dec.right.clone());
    let w1 = OrthonormalBasis::from_columns_unchecked(ComplexMatrix::from_columns(n, &columns_of(&dec.right, 0..r))?);
    let w2 = OrthonormalBasis::from_columns_unchecked(ComplexMatrix::from_columns(n, &columns_of(&dec.right, r..n))?);
    // T = W2* D W1.
    let t = w2.matrix().adjoint().matmul(&d.matmul(w1.matrix())?)?;
    let k = n - r;

    let (blocks, fine) = if r == 0 || k == 0 {
        // T is empty: D is 0 or the identity.
        ([r, k, 0], split.clone())
    } else {
        let ts = svd(&t);
        let tcut = tol::RANK * norm.max(1.0);
        let p = ts.singular_values.iter().filter(|&&s| s > tcut).count();
        let ker_t = columns_of(&ts.right, p..r);
        let coker_t = columns_of(&ts.right, 0..p);
        let range_t = columns_of(&ts.left, 0..p);
        let range_perp = columns_of(&svd(&t.adjoint()).right, p..k);
        let lift = |basis: &OrthonormalBasis, coords: &[Vec<C64>]| -> Vec<Vec<C64>> {
            coords
                .iter()
                .map(|c| basis.matrix().mul_vec(c).expect("coordinate length"))
                .collect()
        };
        let mut cols = lift(&w1, &ker_t);
        cols.extend(lift(&w2, &range_perp));
        cols.extend(lift(&w1, &coker_t));
        cols.extend(lift(&w2, &range_t));
        let fine = OrthonormalBasis::from_columns_unchecked(ComplexMatrix::from_columns(n, &cols)?);
        ([r - p, k - p, p], fine)
    };
    let four_block = compress(d, &fine)?;
    let p = blocks[2];
    let off = blocks[0] + blocks[1] + p;
    let t_polar = ComplexMatrix::from_fn(p, p, |i, j| four_block[(off + i, blocks[0] + blocks[1] + j)]);
    Ok(CanonicalDecomposition {
        ker_dim: k,
        coker_dim: r,
        t,
        four_block,
        t_polar,
        split,
        fine,
        blocks,
    })
}

/// Tail of a sequence beyond its explicit head.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    Zeros,
    Ones,
    /// Infinitely many terms below 1/2 with divergent sum.
    DivergentBelowHalf,
    /// Infinitely many terms at least 1/2 with `Σ(1 − d)` divergent.
    DivergentAboveHalf,
    /// Declared summability class of the whole sequence.
    ClassFlags { in_l1: bool, in_l2: bool, sup: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    pub head: Vec<f64>,
    pub tail: Tail,
}

impl SequenceSpec {
    pub fn new(head: Vec<f64>, tail: Tail) -> Result<Self> {
        let s = SequenceSpec { head, tail };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.head.iter().any(|x| !x.is_finite()) {
            return Err(domain("sequence head must be finite"));
        }
        if let Tail::ClassFlags { in_l1: true, in_l2: false, .. } = self.tail {
            return Err(Error::Specification("ℓ¹ sequences are square-summable".into()));
        }
        Ok(())
    }
}

/// Result of the projection-diagonal test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KadisonVerdict {
    pub feasible: bool,
    /// `Σ_{d<1/2} d`, possibly infinite.
    pub a: f64,
    /// `Σ_{d≥1/2} (1 − d)`, possibly infinite.
    pub b: f64,
    /// `a − b` when both are finite.
    pub index: Option<f64>,
    /// `a − b` lies between 1e-9 and 1e-6 from an integer.
    pub ambiguous: bool,
}

const INDEX_TOL: f64 = 1e-9;
const INDEX_AMBIGUOUS: f64 = 1e-6;

/// Decides whether the sequence is the diagonal of an orthogonal projection.
pub fn kadison_feasibility(s: &SequenceSpec) -> Result<KadisonVerdict> {
    s.validate()?;
    if let Some(x) = s.head.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(domain(format!("projection diagonal entry {x} outside [0, 1]")));
    }
    let mut a: f64 = s.head.iter().filter(|&&x| x < 0.5).sum();
    let mut b: f64 = s.head.iter().filter(|&&x| x >= 0.5).map(|x| 1.0 - x).sum();
    match s.tail {
        Tail::Zeros | Tail::Ones => {}
        Tail::DivergentBelowHalf => a = f64::INFINITY,
        Tail::DivergentAboveHalf => b = f64::INFINITY,
        Tail::ClassFlags { .. } => {
            return Err(Error::Specification(
                "projection test needs a zeros, ones or divergent tail".into(),
            ))
        }
    }
    if a.is_infinite() || b.is_infinite() {
        return Ok(KadisonVerdict { feasible: true, a, b, index: None, ambiguous: false });
    }
    let index = a - b;
    let gap = (index - math::round(index)).abs();
    Ok(KadisonVerdict {
        feasible: gap <= INDEX_TOL,
        a,
        b,
        index: Some(index),
        ambiguous: gap > INDEX_TOL && gap <= INDEX_AMBIGUOUS,
    })
}

/// Real orthogonal projection with diagonal `d`; needs `d ∈ [0,1]ⁿ` with
/// integer sum. Built from plane rotations that fix one diagonal entry at
/// a time, largest target first.
pub fn projection_with_diagonal(d: &[f64]) -> Result<ComplexMatrix> {
    if let Some(x) = d.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(domain(format!("projection diagonal entry {x} outside [0, 1]")));
    }
    let s: f64 = d.iter().sum();
    let m = math::round(s);
    if (s - m).abs() > INDEX_TOL {
        return Err(Error::Infeasible(format!("projection diagonal sums to {s}, not an integer")));
    }
    let n = d.len();
    let m = m as usize;
    let spectrum: Vec<f64> = (0..n).map(|i| if i < m { 1.0 } else { 0.0 }).collect();
    hermitian_with_diagonal(&spectrum, d)
}

/// Real symmetric matrix with eigenvalues `spectrum` and diagonal `d`, for
/// `spectrum` majorizing `d`.
fn hermitian_with_diagonal(spectrum: &[f64], d: &[f64]) -> Result<ComplexMatrix> {
    let n = d.len();
    let mut m = vec![vec![0.0f64; n]; n];
    for (i, l) in spectrum.iter().enumerate() {
        m[i][i] = *l;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    // Coordinate holding each target, and the still-diagonal coordinates.
    let mut slot = vec![0usize; n];
    let mut active: Vec<usize> = (0..n).collect();
    for (step, &target_idx) in order.iter().enumerate() {
        let t = d[target_idx];
        if step + 1 == n {
            slot[target_idx] = active[0];
            break;
        }
        active.sort_by(|&i, &j| m[j][j].total_cmp(&m[i][i]));
        // Adjacent pair bracketing the target.
        let k = (0..active.len() - 1)
            .find(|&k| m[active[k + 1]][active[k + 1]] <= t)
            .unwrap_or(active.len() - 2);
        let (a, b) = (active[k], active[k + 1]);
        let (ma, mb) = (m[a][a], m[b][b]);
        let c2 = if ma > mb { ((t - mb) / (ma - mb)).clamp(0.0, 1.0) } else { 1.0 };
        let (c, s) = (math::sqrt(c2), math::sqrt(1.0 - c2));
        // Rows then columns: new a = c·a + s·b, new b = −s·a + c·b.
        for col in 0..n {
            let (x, y) = (m[a][col], m[b][col]);
            m[a][col] = c * x + s * y;
            m[b][col] = -s * x + c * y;
        }
        for row in m.iter_mut() {
            let (x, y) = (row[a], row[b]);
            row[a] = c * x + s * y;
            row[b] = -s * x + c * y;
        }
        slot[target_idx] = a;
        active.retain(|&i| i != a);
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| C64::new(m[slot[i]][slot[j]], 0.0)))
}

/// An idempotent given either explicitly or by the summability class of
/// the singular values of its nilpotent part (infinite rank).
#[derive(Debug, Clone)]
pub enum IdempotentModel {
    Finite(ComplexMatrix),
    Infinite { nilpotent: SequenceSpec },
}

fn infinite_l2(nilpotent: &SequenceSpec) -> Result<bool> {
    nilpotent.validate()?;
    match nilpotent.tail {
        Tail::ClassFlags { in_l2, .. } => Ok(in_l2),
        _ => Err(Error::Specification(
            "infinite model needs summability flags for its nilpotent part".into(),
        )),
    }
}

/// Whether some orthonormal basis puts only zeros on the diagonal.
pub fn zero_diagonalizable(model: &IdempotentModel) -> Result<bool> {
    match model {
        IdempotentModel::Finite(d) => {
            require_idempotent(d)?;
            Ok(d.max_abs() <= tol::IDEMPOTENT)
        }
        IdempotentModel::Infinite { nilpotent } => Ok(!infinite_l2(nilpotent)?),
    }
}

/// Shape of the set of traces over all bases with convergent diagonal sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceShape {
    Plane,
    Point(C64),
    Empty,
}

pub fn trace_shape(model: &IdempotentModel) -> Result<TraceShape> {
    match model {
        IdempotentModel::Finite(d) => {
            require_idempotent(d)?;
            Ok(TraceShape::Point(d.trace()?))
        }
        IdempotentModel::Infinite { nilpotent } => Ok(if infinite_l2(nilpotent)? {
            TraceShape::Empty
        } else {
            TraceShape::Plane
        }),
    }
}

/// Eigenvalues `cosθ ± √(cos²θ + |z|²)` of `2·Re(e^{iθ}[[1,0],[z,0]])`.
pub fn herm_part_spectrum_2x2(z: C64, theta: f64) -> (f64, f64) {
    let c = math::cos(theta);
    let z2 = z.norm_sqr();
    let root = math::hypot(c, z.norm());
    // Form the cancelling root from the product λ₊λ₋ = −|z|².
    if c >= 0.0 {
        let hi = c + root;
        let lo = if hi == 0.0 { 0.0 } else { -z2 / hi };
        (hi, lo)
    } else {
        let lo = c - root;
        let hi = if lo == 0.0 { 0.0 } else { -z2 / lo };
        (hi, lo)
    }
}

/// Partial sums of the positive and negative parts of
/// `Re(e^{iθ}D)` for `D = ⊕ [[1,0],[d_n,0]]`, with the per-term bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceGrowth {
    /// `Σ_{n≤N} λ₊(d_n)/2`.
    pub pos: Vec<f64>,
    /// `Σ_{n≤N} −λ₋(d_n)/2`.
    pub neg: Vec<f64>,
    /// `Σ_{n≤N} d_n²`.
    pub sum_sq: Vec<f64>,
    /// `1/(cosθ + √(cos²θ + max d²))`.
    pub c1: f64,
    /// `1/(2cosθ)`.
    pub c2: f64,
}

impl TraceGrowth {
    /// Worst violation of `C₁Σd² ≤ 2·neg ≤ C₂Σd²` over all prefixes,
    /// relative to `1 + C₂Σd²`; nonpositive means the sandwich holds.
    pub fn sandwich_violation(&self) -> f64 {
        self.neg
            .iter()
            .zip(&self.sum_sq)
            .map(|(neg, s2)| {
                let scale = 1.0 + self.c2 * s2;
                ((self.c1 * s2 - 2.0 * neg) / scale).max((2.0 * neg - self.c2 * s2) / scale)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn finite_section_trace_growth(d: &[f64], theta: f64) -> Result<TraceGrowth> {
    let c = math::cos(theta);
    if !theta.is_finite() || c <= 0.0 || math::abs(theta) >= core::f64::consts::FRAC_PI_2 {
        return Err(domain(format!("need |θ| < π/2, got {theta}")));
    }
    if let Some(x) = d.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(domain(format!("singular value {x} must be finite and nonnegative")));
    }
    let top = d.iter().copied().fold(0.0, f64::max);
    let mut pos = Vec::with_capacity(d.len());
    let mut neg = Vec::with_capacity(d.len());
    let mut sum_sq = Vec::with_capacity(d.len());
    let (mut p, mut q, mut s2) = (0.0, 0.0, 0.0);
    for &x in d {
        let (hi, lo) = herm_part_spectrum_2x2(C64::new(x, 0.0), theta);
        p += hi / 2.0;
        q += -lo / 2.0;
        s2 += x * x;
        pos.push(p);
        neg.push(q);
        sum_sq.push(s2);
    }
    Ok(TraceGrowth {
        pos,
        neg,
        sum_sq,
        c1: 1.0 / (c + math::hypot(c, top)),
        c2: 1.0 / (2.0 * c),
    })
}

