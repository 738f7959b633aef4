//! Constructive numerical-range tools.
//!
//! The 2×2 idempotent `[[1, 0], [d, 0]]` rotated by `R_θ` has diagonal
//! `((1 + cos2θ + d·sin2θ)/2, (1 − cos2θ − d·sin2θ)/2)`. Fan's step moves a
//! prescribed point of a diagonal segment onto a unit vector while keeping
//! control of its first coordinate. Chaining Fan steps along Carathéodory
//! triples produces zero- and constant-diagonal bases.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::error::{domain, shape, Result};
use crate::linalg::{compress, ComplexMatrix, OrthonormalBasis, C64, ONE, ZERO};
use crate::{math, tol};

/// Diagonal of the rotated 2×2 idempotent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationOutcome {
    pub theta: f64,
    /// Entry on `cosθ·e₁ + sinθ·e₂`.
    pub diag_hi: f64,
    /// Entry on `−sinθ·e₁ + cosθ·e₂`.
    pub diag_lo: f64,
}

/// `d⁻ = d² / (2(1 + √(1+d²)))`, the cancellation-free form of
/// `(√(1+d²) − 1)/2`.
pub fn d_minus(d: f64) -> f64 {
    d * d / (2.0 * (1.0 + math::sqrt(1.0 + d * d)))
}

pub fn rotation_diagonal(d: f64, theta: f64) -> RotationOutcome {
    let (c2, s2) = (math::cos(2.0 * theta), math::sin(2.0 * theta));
    let shift = c2 + d * s2;
    RotationOutcome {
        theta,
        diag_hi: (1.0 + shift) / 2.0,
        diag_lo: (1.0 - shift) / 2.0,
    }
}

/// Columns `cosθ·e₁ + sinθ·e₂` and `−sinθ·e₁ + cosθ·e₂`.
pub fn rotation_basis(theta: f64) -> OrthonormalBasis {
    let (c, s) = (math::cos(theta), math::sin(theta));
    let m = ComplexMatrix::from_fn(2, 2, |i, j| {
        C64::new([[c, -s], [s, c]][i][j], 0.0)
    });
    OrthonormalBasis::from_columns_unchecked(m)
}

pub fn min_diagonal_rotation(d: f64) -> RotationOutcome {
    let theta = math::atan(d) / 2.0;
    RotationOutcome {
        theta,
        diag_hi: 1.0 + d_minus(d),
        diag_lo: -d_minus(d),
    }
}

/// Angle in `[0, arctan(d)/2]` with `diag_lo = x`, by bisection.
pub fn theta_for_target(d: f64, x: f64) -> Result<f64> {
    if !(d >= 0.0) || !d.is_finite() {
        return Err(domain(format!("rotation parameter must be finite and >= 0, got {d}")));
    }
    let floor = -d_minus(d);
    let slack = 1e-14 * (1.0 + d);
    if !(x >= floor - slack && x <= slack) {
        return Err(domain(format!(
            "target {x} outside [{floor}, 0] for d = {d}"
        )));
    }
    if x >= 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, math::atan(d) / 2.0);
    if x <= floor {
        return Ok(hi);
    }
    // diag_lo decreases on [lo, hi].
    for _ in 0..tol::BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rotation_diagonal(d, mid).diag_lo > x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let e_lo = math::abs(rotation_diagonal(d, lo).diag_lo - x);
    let e_hi = math::abs(rotation_diagonal(d, hi).diag_lo - x);
    Ok(if e_lo <= e_hi { lo } else { hi })
}

/// A point on the segment `[d1, d2]` with its convexity coefficient:
/// `target = λ·d1 + (1 − λ)·d2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentTarget {
    pub d1: C64,
    pub d2: C64,
    pub target: C64,
    pub lambda: f64,
}

impl SegmentTarget {
    /// Locates `target` on the segment. Points farther than
    /// `1e-9·(|d1| + |d2| + 1)` from it are rejected; nearer ones are
    /// snapped onto it.
    pub fn new(d1: C64, d2: C64, target: C64) -> Result<Self> {
        let span = d1 - d2;
        let len2 = span.norm_sqr();
        let lambda = if len2 == 0.0 {
            0.0
        } else {
            ((target - d2) * span.conj()).re / len2
        }
        .clamp(0.0, 1.0);
        let snapped = d2 + span * lambda;
        let off = (target - snapped).norm();
        if off > 1e-9 * (d1.norm() + d2.norm() + 1.0) {
            return Err(domain(format!(
                "target {target} lies {off:.3e} off the segment [{d1}, {d2}]"
            )));
        }
        Ok(SegmentTarget {
            d1,
            d2,
            target: snapped,
            lambda,
        })
    }

    /// `λ` is forced to 0 when the endpoints coincide.
    pub fn from_lambda(d1: C64, d2: C64, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(domain(format!("convexity coefficient {lambda} outside [0, 1]")));
        }
        let lambda = if d1 == d2 { 0.0 } else { lambda };
        Ok(SegmentTarget {
            d1,
            d2,
            target: d2 + (d1 - d2) * lambda,
            lambda,
        })
    }
}

/// Orthonormal `{b, f}` in `ℂ²` with `(Af, f) = target`,
/// `(Ab, b) = d1 + d2 − target` and `|(e₁, f)|² ≤ λ`. Returns `(b, f)`.
pub fn fan_pair(a: &ComplexMatrix, t: &SegmentTarget) -> Result<(Vec<C64>, Vec<C64>)> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(shape(format!("Fan step needs a 2x2 matrix, got {}x{}", a.rows(), a.cols())));
    }
    let scale = 1e-12 * (1.0 + a.max_abs());
    if (a[(0, 0)] - t.d1).norm() > scale || (a[(1, 1)] - t.d2).norm() > scale {
        return Err(domain("segment endpoints differ from the matrix diagonal"));
    }
    // Re-locate against the exact diagonal so a caller-rounded target is
    // still held to the off-segment tolerance.
    let t = SegmentTarget::new(a[(0, 0)], a[(1, 1)], t.target)?;
    Ok(fan_pair_unchecked(a, t.lambda))
}

/// Fan step on an exact diagonal. `lambda` is the convexity coefficient of
/// the target relative to `(a₁₁, a₂₂)`.
pub(crate) fn fan_pair_unchecked(a: &ComplexMatrix, lambda: f64) -> (Vec<C64>, Vec<C64>) {
    let (d1, d2) = (a[(0, 0)], a[(1, 1)]);
    if d1 == d2 {
        return (vec![ONE, ZERO], vec![ZERO, ONE]);
    }
    let diff = d1 - d2;
    let u = diff / diff.norm();
    // Cross term X(φ) = a₁₂·w + a₂₁·w̄ with w = e^{iφ}; make X a
    // nonnegative multiple of d1 − d2.
    let p = a[(0, 1)] * u.conj();
    let q = a[(1, 0)] * u.conj();
    let alpha = p.re - q.re;
    let beta = p.im + q.im;
    let mut phi = if alpha == 0.0 && beta == 0.0 {
        0.0
    } else {
        math::atan2(-beta, alpha)
    };
    let mut w = C64::new(math::cos(phi), math::sin(phi));
    let mut mu = ((a[(0, 1)] * w + a[(1, 0)] * w.conj()) * u.conj()).re / diff.norm();
    if mu < 0.0 {
        phi += core::f64::consts::PI;
        w = C64::new(math::cos(phi), math::sin(phi));
        mu = -mu;
    }
    // g(θ) = cos²θ + μ·cosθ·sinθ decreases from its maximum (≥ 1) at
    // arctan(μ)/2 down to 0 at π/2.
    let g = |th: f64| {
        let (c, s) = (math::cos(th), math::sin(th));
        c * c + mu * c * s
    };
    let (mut lo, mut hi) = (math::atan(mu) / 2.0, FRAC_PI_2);
    let theta = if lambda <= 0.0 {
        FRAC_PI_2
    } else {
        for _ in 0..tol::BISECTION_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) > lambda {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // hi satisfies g ≤ λ, which keeps cos² under λ.
        let cl = math::cos(lo);
        if math::abs(g(lo) - lambda) < math::abs(g(hi) - lambda) && cl * cl <= lambda {
            lo
        } else {
            hi
        }
    };
    let (c, s) = if lambda <= 0.0 {
        (0.0, 1.0)
    } else {
        (math::cos(theta), math::sin(theta))
    };
    let f = vec![C64::new(c, 0.0), w * s];
    let b = vec![C64::new(s, 0.0), -(w * c)];
    (b, f)
}

/// At most three of `points` whose convex hull holds 0, with weights.
pub fn caratheodory_zero(points: &[C64], weights: &[f64]) -> Result<(Vec<usize>, Vec<f64>)> {
    if points.len() != weights.len() || points.is_empty() {
        return Err(shape("points and weights must be nonempty and of equal length"));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(domain("weights must be nonnegative"));
    }
    let total: f64 = weights.iter().sum();
    let scale = 1.0 + points.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let centroid: C64 = points.iter().zip(weights).map(|(p, w)| p * *w).sum();
    if math::abs(total - 1.0) > 1e-10 || centroid.norm() > 1e-10 * scale {
        return Err(domain(format!(
            "weights sum to {total} with weighted mean {centroid}; no zero combination given"
        )));
    }
    Ok(caratheodory_search(points, weights))
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn combo_residual(points: &[C64], idx: &[usize], mu: &[f64]) -> f64 {
    idx.iter().zip(mu).map(|(&i, m)| points[i] * *m).sum::<C64>().norm()
}

/// Unchecked search: exhaustive for small inputs, falling back to the
/// weight-reduction argument.
pub(crate) fn caratheodory_search(points: &[C64], weights: &[f64]) -> (Vec<usize>, Vec<f64>) {
    let m = points.len();
    let scale = 1.0 + points.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let eps = 1e-12 * scale;
    if m <= 64 {
        if let Some(found) = small_search(points, eps) {
            return found;
        }
    }
    reduce(points, weights)
}

fn small_search(points: &[C64], eps: f64) -> Option<(Vec<usize>, Vec<f64>)> {
    let m = points.len();
    let best = (0..m).min_by(|&i, &j| points[i].norm().total_cmp(&points[j].norm()))?;
    if points[best].norm() <= eps {
        return Some((vec![best], vec![1.0]));
    }
    for i in 0..m {
        for j in i + 1..m {
            let (a, b) = (points[i], points[j]);
            if (a.re * b.re + a.im * b.im) >= 0.0 {
                continue;
            }
            let (na, nb) = (a.norm(), b.norm());
            let mu = [nb / (na + nb), na / (na + nb)];
            if combo_residual(points, &[i, j], &mu) <= eps {
                return Some((vec![i, j], mu.to_vec()));
            }
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let (a, b, c) = (points[i], points[j], points[k]);
                let det = cross(b - a, c - a);
                if det == 0.0 {
                    continue;
                }
                // 0 = a + β(b − a) + γ(c − a)
                let beta = cross(-a, c - a) / det;
                let gamma = cross(b - a, -a) / det;
                let alpha = 1.0 - beta - gamma;
                let raw = [alpha, beta, gamma];
                if raw.iter().any(|x| *x < -1e-12) {
                    continue;
                }
                let clamped: Vec<f64> = raw.iter().map(|x| x.max(0.0)).collect();
                let s: f64 = clamped.iter().sum();
                let mu: Vec<f64> = clamped.iter().map(|x| x / s).collect();
                if combo_residual(points, &[i, j, k], &mu) <= eps {
                    return Some((vec![i, j, k], mu));
                }
            }
        }
    }
    None
}

/// Drops support points along affine dependencies until at most three are
/// left.
fn reduce(points: &[C64], weights: &[f64]) -> (Vec<usize>, Vec<f64>) {
    let mut w = weights.to_vec();
    let mut support: Vec<usize> = (0..points.len()).filter(|&i| w[i] > 0.0).collect();
    while support.len() > 3 {
        let quad = [support[0], support[1], support[2], support[3]];
        let rows = [
            quad.map(|i| points[i].re),
            quad.map(|i| points[i].im),
            [1.0; 4],
        ];
        let mut c = null_vector_3x4(rows);
        if c.iter().all(|x| *x <= 0.0) {
            c.iter_mut().for_each(|x| *x = -*x);
        }
        let step = (0..4)
            .filter(|&t| c[t] > 0.0)
            .map(|t| w[quad[t]] / c[t])
            .fold(f64::INFINITY, f64::min);
        for t in 0..4 {
            w[quad[t]] -= step * c[t];
        }
        let drop = (0..4)
            .filter(|&t| c[t] > 0.0)
            .min_by(|&s, &t| (w[quad[s]]).total_cmp(&w[quad[t]]))
            .map(|t| quad[t]);
        for t in 0..4 {
            if w[quad[t]] < 0.0 {
                w[quad[t]] = 0.0;
            }
        }
        if let Some(i) = drop {
            w[i] = 0.0;
        }
        support.retain(|&i| w[i] > 0.0);
    }
    let s: f64 = support.iter().map(|&i| w[i]).sum();
    let mu = support.iter().map(|&i| w[i] / s).collect();
    (support, mu)
}

/// A nonzero null vector of a 3×4 real matrix.
fn null_vector_3x4(mut a: [[f64; 4]; 3]) -> [f64; 4] {
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..4 {
        if row == 3 {
            break;
        }
        let (best, val) = (row..3)
            .map(|r| (r, math::abs(a[r][col])))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= 1e-14 {
            continue;
        }
        a.swap(row, best);
        let p = a[row][col];
        for x in a[row].iter_mut() {
            *x /= p;
        }
        for r in 0..3 {
            if r != row {
                let f = a[r][col];
                for k in 0..4 {
                    a[r][k] -= f * a[row][k];
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    let free = (0..4)
        .find(|c| pivots.iter().all(|(_, pc)| pc != c))
        .unwrap_or(3);
    let mut v = [0.0; 4];
    v[free] = 1.0;
    for (r, c) in pivots {
        v[c] = -a[r][free];
    }
    v
}

/// Replaces an orthonormal family by one with the same span whose
/// diagonal entries for `m` all equal the family's mean diagonal entry.
/// `m` acts on the coordinates of the vectors.
fn equalize(m: &ComplexMatrix, family: Vec<Vec<C64>>) -> Vec<Vec<C64>> {
    let sparse = m.sparse();
    let value = |v: &[C64]| sparse.quadratic_form(v);
    let mut live: Vec<(Vec<C64>, C64)> = family
        .into_iter()
        .map(|v| {
            let x = value(&v);
            (v, x)
        })
        .collect();
    let mut out = Vec::with_capacity(live.len());
    while live.len() > 1 {
        let count = live.len() as f64;
        let mean = live.iter().map(|(_, x)| *x).sum::<C64>() / count;
        let centred: Vec<C64> = live.iter().map(|(_, x)| x - mean).collect();
        let uniform = vec![1.0 / count; live.len()];
        let (idx, mu) = caratheodory_search(&centred, &uniform);
        match idx.len() {
            1 => {
                out.push(live.remove(idx[0]).0);
            }
            2 => {
                let (f, b) = fan_on(&sparse, &live[idx[0]].0, &live[idx[1]].0, mean);
                out.push(f);
                let bx = value(&b);
                live[idx[0]] = (b, bx);
                live.remove(idx[1]);
            }
            _ => {
                let (i, j, k) = (idx[0], idx[1], idx[2]);
                let q = (live[i].1 * mu[0] + live[j].1 * mu[1]) / (mu[0] + mu[1]);
                let (f1, b1) = fan_on(&sparse, &live[i].0, &live[j].0, q);
                let (f, b2) = fan_on(&sparse, &f1, &live[k].0, mean);
                out.push(f);
                let (x1, x2) = (value(&b1), value(&b2));
                live[i] = (b1, x1);
                live[j] = (b2, x2);
                live.remove(k);
            }
        }
    }
    out.extend(live.into_iter().map(|(v, _)| v));
    out
}

/// Fan step on `span{u, v}` aimed at `target`; returns `(f, b)` in ambient
/// coordinates.
fn fan_on(
    m: &crate::linalg::SparseRows,
    u: &[C64],
    v: &[C64],
    target: C64,
) -> (Vec<C64>, Vec<C64>) {
    let a = ComplexMatrix::from_fn(2, 2, |r, c| {
        let (x, y) = ([u, v][c], [u, v][r]);
        m.sesquilinear(x, y)
    });
    let (d1, d2) = (a[(0, 0)], a[(1, 1)]);
    let span = d1 - d2;
    let lambda = if span.norm_sqr() == 0.0 {
        0.0
    } else {
        (((target - d2) * span.conj()).re / span.norm_sqr()).clamp(0.0, 1.0)
    };
    let (b, f) = fan_pair_unchecked(&a, lambda);
    let lift = |coef: &[C64]| -> Vec<C64> {
        u.iter().zip(v).map(|(x, y)| x * coef[0] + y * coef[1]).collect()
    };
    (lift(&f), lift(&b))
}

/// A basis in which the trace-zero matrix `x` has zero diagonal.
pub fn zero_diagonal_basis(x: &ComplexMatrix) -> Result<OrthonormalBasis> {
    if !x.is_square() {
        return Err(shape("zero-diagonal basis needs a square matrix"));
    }
    let n = x.rows();
    let tr = x.trace()?;
    let norm = crate::linalg::operator_norm(x);
    if tr.norm() > 1e-9 * n as f64 * norm {
        return Err(domain(format!("trace {tr} is not zero")));
    }
    let family = ComplexMatrix::identity(n).columns();
    let vectors = equalize(x, family);
    Ok(OrthonormalBasis::from_columns_unchecked(
        ComplexMatrix::from_columns(n, &vectors)?,
    ))
}

/// Replaces the columns of `basis` listed in `idx` by orthonormal vectors
/// with the same span, each carrying the mean diagonal entry
/// `λ = (restricted trace)/|idx|`. Returned in ambient coordinates.
pub fn constant_diagonal_rebasis(
    m: &ComplexMatrix,
    basis: &OrthonormalBasis,
    idx: &[usize],
) -> Result<OrthonormalBasis> {
    let mut seen = idx.to_vec();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(shape("repeated index"));
    }
    let w = basis.select(idx)?;
    let c = compress(m, &w)?;
    let k = idx.len();
    if k == 0 {
        return Ok(w);
    }
    let lambda = c.trace()? / k as f64;
    let inner = equalize(&c.shift(lambda)?, ComplexMatrix::identity(k).columns());
    let g = ComplexMatrix::from_columns(k, &inner)?;
    Ok(OrthonormalBasis::from_columns_unchecked(w.matrix().matmul(&g)?))
}
