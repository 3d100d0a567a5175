//! Dense complex linear algebra used by the spectral layer.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exterior::C64;

pub type CMatrix = DMatrix<C64>;

/// Relative factor for declaring an eigenvalue zero: `λ ≤ KERNEL_REL · max(λ_max, 1)`.
pub const KERNEL_REL: f64 = 1e-9;

/// Relative gap below which two eigenvalues are treated as one cluster.
pub const CLUSTER_REL: f64 = 1e-7;

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn vec_norm(v: &DVector<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hermitian_residual(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Rejects inputs whose anti-Hermitian part exceeds `1e-12 · max(1, |A|)`.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let residual = hermitian_residual(m);
    if residual > 1e-12 * max_abs(m).max(1.0) {
        return Err(Error::NotHermitian { residual });
    }
    Ok(hermitian_eigen_unchecked(m))
}

fn hermitian_eigen_unchecked(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
    let values = order.iter().map(|i| eig.eigenvalues[*i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Matrix product that skips zero entries; falls back to the dense product
/// when both factors are dense. Assembled operators are mostly Kronecker
/// products with identities, so this is the common fast path.
pub fn mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "inner dimensions differ");
    let nonzero = |m: &CMatrix| m.iter().filter(|z| z.re != 0.0 || z.im != 0.0).count();
    let (na, nb) = (nonzero(a), nonzero(b));
    if 3 * na > a.len() && 3 * nb > b.len() {
        return a * b;
    }
    // Nonzero pattern of each column of `a`.
    let cols: Vec<Vec<(usize, C64)>> = (0..a.ncols())
        .map(|k| a.column(k).iter().enumerate().filter(|(_, z)| z.re != 0.0 || z.im != 0.0).map(|(i, z)| (i, *z)).collect())
        .collect();
    let mut out = CMatrix::zeros(a.nrows(), b.ncols());
    for j in 0..b.ncols() {
        let mut target = out.column_mut(j);
        for (k, bkj) in b.column(j).iter().enumerate() {
            if bkj.re == 0.0 && bkj.im == 0.0 {
                continue;
            }
            for (i, aik) in &cols[k] {
                target[*i] += aik * bkj;
            }
        }
    }
    out
}

/// Kernel threshold for a list of eigenvalues.
pub fn kernel_threshold(values: &[f64]) -> f64 {
    let top = values.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    KERNEL_REL * top.max(1.0)
}

/// Groups consecutive sorted values into clusters, returning index ranges.
pub fn clusters(sorted: &[f64], rel: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        let split = i == sorted.len() || {
            let (a, b) = (sorted[i - 1], sorted[i]);
            (b - a).abs() > rel * a.abs().max(b.abs()).max(1.0)
        };
        if split {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Square root of a positive semidefinite Hermitian matrix by spectral
/// calculus; eigenvalues at or below the kernel threshold are set to zero.
pub fn hermitian_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigen(m)?;
    let thr = kernel_threshold(&values);
    if let Some(v) = values.iter().find(|v| **v < -thr) {
        return Err(Error::Internal(format!("square root of a matrix with eigenvalue {v:e}")));
    }
    let roots = DVector::from_iterator(values.len(), values.iter().map(|v| C64::new(if *v <= thr { 0.0 } else { v.sqrt() }, 0.0)));
    Ok(&vectors * CMatrix::from_diagonal(&roots) * vectors.adjoint())
}

/// Orthonormal basis of the null space of `a`.
pub fn null_space(a: &CMatrix) -> CMatrix {
    let cols = a.ncols();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    if a.nrows() == 0 {
        return CMatrix::identity(cols, cols);
    }
    let gram = a.adjoint() * a;
    let (values, vectors) = hermitian_eigen_unchecked(&gram);
    let thr = kernel_threshold(&values);
    let keep: Vec<usize> = (0..cols).filter(|i| values[*i] <= thr).collect();
    vectors.select_columns(&keep)
}

/// Orthonormal basis of the column space of `a`.
pub fn column_space(a: &CMatrix) -> CMatrix {
    let rows = a.nrows();
    if a.ncols() == 0 || rows == 0 {
        return CMatrix::zeros(rows, 0);
    }
    let gram = a * a.adjoint();
    let (values, vectors) = hermitian_eigen_unchecked(&gram);
    let thr = kernel_threshold(&values);
    let keep: Vec<usize> = (0..rows).filter(|i| values[*i] > thr).collect();
    vectors.select_columns(&keep)
}

/// Numerical rank from singular values (`σ > 1e-9 · max(σ_max, 1)`).
pub fn rank(a: &CMatrix) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let sv = a.clone().singular_values();
    let top = sv.iter().fold(0.0f64, |x, y| x.max(*y));
    let thr = KERNEL_REL * top.max(1.0);
    sv.iter().filter(|s| **s > thr).count()
}

/// Orthonormal basis of `span(U) ∩ span(V)` for orthonormal `U`, `V`.
pub fn intersection(u: &CMatrix, v: &CMatrix) -> CMatrix {
    if u.ncols() == 0 || v.ncols() == 0 {
        return CMatrix::zeros(u.nrows(), 0);
    }
    let outside = u - v * (v.adjoint() * u);
    let coeffs = null_space(&outside);
    orthonormalize(&(u * coeffs))
}

/// Orthonormal basis of the orthogonal complement of `span(U)` inside `span(V)`.
pub fn complement_within(v: &CMatrix, u: &CMatrix) -> CMatrix {
    if u.ncols() == 0 {
        return v.clone();
    }
    let projected = v - u * (u.adjoint() * v);
    column_space(&projected)
}

/// Orthonormal basis for the span of `a`'s columns.
pub fn orthonormalize(a: &CMatrix) -> CMatrix {
    column_space(a)
}

/// Sum of two subspaces.
pub fn subspace_sum(u: &CMatrix, v: &CMatrix) -> CMatrix {
    let mut cols: Vec<DVector<C64>> = u.column_iter().map(|c| c.into_owned()).collect();
    cols.extend(v.column_iter().map(|c| c.into_owned()));
    if cols.is_empty() {
        return CMatrix::zeros(u.nrows(), 0);
    }
    column_space(&CMatrix::from_columns(&cols))
}

/// Largest principal angle between equal-dimensional subspaces with
/// orthonormal bases, from the sines `σ((1 - UU†)V)`. Returns `None` when the
/// dimensions differ.
pub fn max_principal_angle(u: &CMatrix, v: &CMatrix) -> Option<f64> {
    if u.ncols() != v.ncols() {
        return None;
    }
    if u.ncols() == 0 {
        return Some(0.0);
    }
    let residual = v - u * (u.adjoint() * v);
    let s = residual.singular_values().iter().fold(0.0f64, |a, b| a.max(*b));
    Some(s.min(1.0).asin())
}

/// `B† A B`.
pub fn restrict(a: &CMatrix, basis: &CMatrix) -> CMatrix {
    basis.adjoint() * a * basis
}

/// `|A B - B (B† A B)|`: zero iff `span(B)` is `A`-invariant.
pub fn invariance_residual(a: &CMatrix, basis: &CMatrix) -> f64 {
    if basis.ncols() == 0 {
        return 0.0;
    }
    let ab = a * basis;
    max_abs(&(&ab - basis * (basis.adjoint() * &ab)))
}

/// Rounds to a fixed number of significant digits.
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mag = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits - 1 - mag);
    (x * scale).round() / scale
}

/// A joint eigenspace of commuting Hermitian operators.
#[derive(Clone, Debug)]
pub struct JointSpace {
    /// Eigenvalue of each operator on this space (values within the kernel
    /// threshold of the operator are reported as exact zero).
    pub tags: Vec<f64>,
    /// Orthonormal basis (columns).
    pub basis: CMatrix,
}

/// Simultaneous eigendecomposition of commuting Hermitian matrices.
///
/// Diagonalizes a generic combination first, then refines any cluster on
/// which some operator is not scalar by sequential diagonalization.
pub fn joint_decomposition(ops: &[&CMatrix]) -> Result<Vec<JointSpace>> {
    let Some(first) = ops.first() else {
        return Ok(Vec::new());
    };
    let dim = first.nrows();
    if dim == 0 {
        return Ok(Vec::new());
    }
    let mut scales = Vec::with_capacity(ops.len());
    for a in ops {
        if a.nrows() != dim || a.ncols() != dim {
            return Err(Error::DimensionMismatch { left: a.nrows(), right: dim });
        }
        let residual = hermitian_residual(a);
        if residual > 1e-12 * max_abs(a).max(1.0) {
            return Err(Error::NotHermitian { residual });
        }
        let (values, _) = hermitian_eigen_unchecked(a);
        scales.push(values.iter().fold(0.0f64, |x, y| x.max(y.abs())).max(1.0));
    }
    // Generic weights: irrational ratios avoid accidental coincidences.
    let weights = [1.0, std::f64::consts::SQRT_2 - 0.5, std::f64::consts::E / 7.0, std::f64::consts::PI / 11.0];
    let mut combo = CMatrix::zeros(dim, dim);
    for (k, a) in ops.iter().enumerate() {
        combo += *a * C64::new(weights[k % weights.len()] * (1.0 + k as f64 / 10.0) / scales[k], 0.0);
    }
    let (values, vectors) = hermitian_eigen_unchecked(&combo);
    let mut out = Vec::new();
    for range in clusters(&values, CLUSTER_REL) {
        let basis = vectors.columns(range.start, range.len()).into_owned();
        refine(ops, &scales, basis, 0, &mut out)?;
    }
    out.sort_by(|a, b| {
        for (x, y) in a.tags.iter().zip(&b.tags) {
            match x.total_cmp(y) {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        std::cmp::Ordering::Equal
    });
    Ok(out)
}

fn refine(ops: &[&CMatrix], scales: &[f64], basis: CMatrix, from: usize, out: &mut Vec<JointSpace>) -> Result<()> {
    let mut tags = Vec::with_capacity(ops.len());
    for (k, a) in ops.iter().enumerate() {
        let r = restrict(a, &basis);
        let d = r.nrows();
        let mean = (0..d).map(|i| r[(i, i)].re).sum::<f64>() / d as f64;
        let deviation = max_abs(&(&r - CMatrix::identity(d, d) * C64::new(mean, 0.0)));
        if k >= from && deviation > CLUSTER_REL * scales[k] {
            let (values, vectors) = hermitian_eigen_unchecked(&r);
            for range in clusters(&values, CLUSTER_REL) {
                let sub = &basis * vectors.columns(range.start, range.len());
                refine(ops, scales, sub, k + 1, out)?;
            }
            return Ok(());
        }
        tags.push(if mean.abs() <= KERNEL_REL * scales[k] { 0.0 } else { mean });
    }
    out.push(JointSpace { tags, basis });
    Ok(())
}
