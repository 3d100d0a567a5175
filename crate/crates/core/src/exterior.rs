//! Pointwise exterior and Lefschetz algebra of a contact metric structure.
//!
//! Forms are expanded over the adapted complex coframe
//! `{θ, ε¹..εⁿ, ε̄¹..ε̄ⁿ}` with `εʲ = eʲ + i fʲ`, where the real coframe
//! `{θ, eʲ, fʲ}` is orthonormal and `θ∧e¹∧f¹∧…∧eⁿ∧fⁿ` is the positive volume
//! form. In this coframe distinct monomials are orthogonal and a monomial with
//! `p` holomorphic and `q` antiholomorphic factors has squared norm `2^(p+q)`.
//!
//! Coefficients are exact complex doubles; only exact zeros are pruned.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Largest supported `n` (the coframe of a `2n+1` manifold must fit in 16 bits).
pub const MAX_N: usize = 7;

pub(crate) const I: C64 = Complex { re: 0.0, im: 1.0 };
pub(crate) const ONE: C64 = Complex { re: 1.0, im: 0.0 };
pub(crate) const ZERO: C64 = Complex { re: 0.0, im: 0.0 };

/// A coframe monomial `θ^a ∧ ε^{holo} ∧ ε̄^{anti}` in canonical order.
///
/// Index sets are stored as bitmasks (bit `j-1` stands for index `j`), which
/// keeps them strictly increasing and duplicate-free by construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoframeIndex {
    theta: bool,
    holo: u16,
    anti: u16,
}

impl CoframeIndex {
    pub const ONE: CoframeIndex = CoframeIndex { theta: false, holo: 0, anti: 0 };

    pub fn new(theta: bool, holo: &[usize], anti: &[usize], n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(CoframeIndex { theta, holo: index_mask(holo, n)?, anti: index_mask(anti, n)? })
    }

    pub fn theta() -> Self {
        CoframeIndex { theta: true, holo: 0, anti: 0 }
    }

    pub fn eps(j: usize) -> Self {
        CoframeIndex { theta: false, holo: 1 << (j - 1), anti: 0 }
    }

    pub fn eps_bar(j: usize) -> Self {
        CoframeIndex { theta: false, holo: 0, anti: 1 << (j - 1) }
    }

    pub fn has_theta(&self) -> bool {
        self.theta
    }

    pub fn holo(&self) -> Vec<usize> {
        mask_indices(self.holo)
    }

    pub fn anti(&self) -> Vec<usize> {
        mask_indices(self.anti)
    }

    pub fn holo_degree(&self) -> usize {
        self.holo.count_ones() as usize
    }

    pub fn anti_degree(&self) -> usize {
        self.anti.count_ones() as usize
    }

    pub fn horizontal_degree(&self) -> usize {
        self.holo_degree() + self.anti_degree()
    }

    pub fn degree(&self) -> usize {
        self.theta as usize + self.horizontal_degree()
    }

    pub fn bidegree(&self) -> Bidegree {
        Bidegree { i: self.holo_degree(), j: self.anti_degree(), vertical: self.theta }
    }

    /// Squared pointwise norm of the monomial.
    pub fn norm_sq(&self) -> f64 {
        (1u32 << self.horizontal_degree()) as f64
    }

    pub fn without_theta(&self) -> Self {
        CoframeIndex { theta: false, ..*self }
    }

    pub fn with_theta(&self) -> Self {
        CoframeIndex { theta: true, ..*self }
    }

    /// Exchanges holomorphic and antiholomorphic index sets (as sets).
    pub fn swapped(&self) -> Self {
        CoframeIndex { theta: self.theta, holo: self.anti, anti: self.holo }
    }

    /// Positions of the factors in the ordered coframe
    /// `θ = 0, εʲ = j, ε̄ʲ = n + j`, ascending.
    pub fn positions(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree());
        if self.theta {
            out.push(0);
        }
        out.extend(self.holo());
        out.extend(self.anti().into_iter().map(|j| n + j));
        out
    }

    /// Builds the monomial `ω^{p₁}∧…∧ω^{p_k}` for arbitrary positions, returning
    /// the canonical index and the reordering sign, or `None` on a repeated factor.
    pub fn from_positions(positions: &[usize], n: usize) -> Option<(CoframeIndex, f64)> {
        let mut sorted = positions.to_vec();
        let mut sign = 1.0;
        for i in 0..sorted.len() {
            for j in 0..sorted.len() - 1 - i {
                if sorted[j] == sorted[j + 1] {
                    return None;
                }
                if sorted[j] > sorted[j + 1] {
                    sorted.swap(j, j + 1);
                    sign = -sign;
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        let mut idx = CoframeIndex::ONE;
        for p in sorted {
            if p == 0 {
                idx.theta = true;
            } else if p <= n {
                idx.holo |= 1 << (p - 1);
            } else {
                idx.anti |= 1 << (p - n - 1);
            }
        }
        Some((idx, sign))
    }

    fn sort_key(&self) -> (usize, bool, u16, u16) {
        // holomorphic factors first within a degree: ε before ε̄
        (self.degree(), self.theta, u16::MAX - self.holo, self.anti)
    }
}

impl PartialOrd for CoframeIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CoframeIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Display for CoframeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        if self.theta {
            parts.push("θ".to_string());
        }
        parts.extend(self.holo().into_iter().map(|j| format!("ε{j}")));
        parts.extend(self.anti().into_iter().map(|j| format!("ε̄{j}")));
        write!(f, "{}", parts.join("∧"))
    }
}

/// Bidegree `(i, j)` of a monomial plus whether it carries a `θ` factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Bidegree {
    pub i: usize,
    pub j: usize,
    pub vertical: bool,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::InvalidParameter(format!("n must be in 1..={MAX_N}, got {n}")));
    }
    Ok(())
}

fn index_mask(indices: &[usize], n: usize) -> Result<u16> {
    let mut mask = 0u16;
    let mut last = 0;
    for &j in indices {
        if j == 0 || j > n || j <= last {
            return Err(Error::InvalidParameter(format!(
                "coframe indices must be strictly increasing within 1..={n}: {indices:?}"
            )));
        }
        mask |= 1 << (j - 1);
        last = j;
    }
    Ok(mask)
}

fn mask_indices(mask: u16) -> Vec<usize> {
    (0..16).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).collect()
}

/// All monomials of the given degree, in canonical order.
pub fn monomials(n: usize, degree: usize) -> Vec<CoframeIndex> {
    let width = 2 * n + 1;
    if degree > width {
        return Vec::new();
    }
    let mut out: Vec<CoframeIndex> = (0u32..(1 << width))
        .filter(|m| m.count_ones() as usize == degree)
        .map(|m| {
            let positions: Vec<usize> = (0..width).filter(|b| m & (1 << b) != 0).collect();
            CoframeIndex::from_positions(&positions, n).expect("distinct positions").0
        })
        .collect();
    out.sort();
    out
}

/// Monomials of the given degree without a `θ` factor.
pub fn horizontal_monomials(n: usize, degree: usize) -> Vec<CoframeIndex> {
    monomials(n, degree).into_iter().filter(|m| !m.has_theta()).collect()
}

/// A complexified exterior-algebra element at a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointwiseForm {
    n: usize,
    coeffs: BTreeMap<CoframeIndex, C64>,
}

impl PointwiseForm {
    pub fn zero(n: usize) -> Self {
        PointwiseForm { n, coeffs: BTreeMap::new() }
    }

    pub fn monomial(n: usize, idx: CoframeIndex, c: C64) -> Self {
        let mut f = Self::zero(n);
        f.add_term(idx, c);
        f
    }

    pub fn scalar(n: usize, c: C64) -> Self {
        Self::monomial(n, CoframeIndex::ONE, c)
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, ONE)
    }

    pub fn theta(n: usize) -> Self {
        Self::monomial(n, CoframeIndex::theta(), ONE)
    }

    pub fn eps(n: usize, j: usize) -> Self {
        Self::monomial(n, CoframeIndex::eps(j), ONE)
    }

    pub fn eps_bar(n: usize, j: usize) -> Self {
        Self::monomial(n, CoframeIndex::eps_bar(j), ONE)
    }

    /// Real coframe element `eʲ = (εʲ + ε̄ʲ)/2`.
    pub fn e(n: usize, j: usize) -> Self {
        (Self::eps(n, j) + Self::eps_bar(n, j)) * C64::new(0.5, 0.0)
    }

    /// Real coframe element `fʲ = (εʲ - ε̄ʲ)/(2i)`.
    pub fn f(n: usize, j: usize) -> Self {
        (Self::eps(n, j) - Self::eps_bar(n, j)) * C64::new(0.0, -0.5)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_term(&mut self, idx: CoframeIndex, c: C64) {
        let entry = self.coeffs.entry(idx).or_insert(ZERO);
        *entry += c;
        if *entry == ZERO {
            self.coeffs.remove(&idx);
        }
    }

    pub fn coeff(&self, idx: &CoframeIndex) -> C64 {
        self.coeffs.get(idx).copied().unwrap_or(ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CoframeIndex, &C64)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree if homogeneous (zero form reports `None`).
    pub fn degree(&self) -> Option<usize> {
        let mut degrees = self.coeffs.keys().map(|k| k.degree());
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    /// Component of a fixed degree.
    pub fn part(&self, degree: usize) -> Self {
        self.filter(|idx| idx.degree() == degree)
    }

    pub fn filter(&self, keep: impl Fn(&CoframeIndex) -> bool) -> Self {
        PointwiseForm {
            n: self.n,
            coeffs: self.coeffs.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (*k, *v)).collect(),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&CoframeIndex, C64) -> C64) -> Self {
        let mut out = Self::zero(self.n);
        for (k, v) in &self.coeffs {
            out.add_term(*k, f(k, *v));
        }
        out
    }

    /// Largest coefficient modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.clone() - other.clone()).coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Coordinates over `basis`, scaled to an orthonormal frame when `normalized`.
    pub fn to_vector(&self, basis: &[CoframeIndex], normalized: bool) -> DVector<C64> {
        DVector::from_iterator(
            basis.len(),
            basis.iter().map(|b| {
                let c = self.coeff(b);
                if normalized {
                    c * b.norm_sq().sqrt()
                } else {
                    c
                }
            }),
        )
    }

    pub fn from_vector(n: usize, basis: &[CoframeIndex], v: &DVector<C64>, normalized: bool) -> Self {
        let mut out = Self::zero(n);
        for (b, c) in basis.iter().zip(v.iter()) {
            let c = if normalized { *c / b.norm_sq().sqrt() } else { *c };
            out.add_term(*b, c);
        }
        out
    }
}

impl Add for PointwiseForm {
    type Output = PointwiseForm;
    fn add(mut self, rhs: PointwiseForm) -> PointwiseForm {
        assert_eq!(self.n, rhs.n, "adding forms over different n");
        for (k, v) in rhs.coeffs {
            self.add_term(k, v);
        }
        self
    }
}

impl Sub for PointwiseForm {
    type Output = PointwiseForm;
    fn sub(self, rhs: PointwiseForm) -> PointwiseForm {
        self + (-rhs)
    }
}

impl Neg for PointwiseForm {
    type Output = PointwiseForm;
    fn neg(self) -> PointwiseForm {
        self.map_coeffs(|_, c| -c)
    }
}

impl Mul<C64> for PointwiseForm {
    type Output = PointwiseForm;
    fn mul(self, rhs: C64) -> PointwiseForm {
        self.map_coeffs(|_, c| c * rhs)
    }
}

impl fmt::Display for PointwiseForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.coeffs.iter().map(|(k, c)| format!("({:+}{:+}i)·{k}", c.re, c.im)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Exterior product.
pub fn wedge(a: &PointwiseForm, b: &PointwiseForm) -> Result<PointwiseForm> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { left: a.n, right: b.n });
    }
    let n = a.n;
    let mut out = PointwiseForm::zero(n);
    for (ka, ca) in &a.coeffs {
        let pa = ka.positions(n);
        for (kb, cb) in &b.coeffs {
            let mut p = pa.clone();
            p.extend(kb.positions(n));
            if let Some((idx, sign)) = CoframeIndex::from_positions(&p, n) {
                out.add_term(idx, ca * cb * sign);
            }
        }
    }
    Ok(out)
}

/// Interior product with the Reeb field: `ι_T(θ∧α) = α`, horizontal monomials die.
pub fn interior_t(a: &PointwiseForm) -> PointwiseForm {
    let mut out = PointwiseForm::zero(a.n);
    for (k, c) in &a.coeffs {
        if k.theta {
            out.add_term(k.without_theta(), *c);
        }
    }
    out
}

/// `θ ∧ a`.
pub fn theta_wedge(a: &PointwiseForm) -> PointwiseForm {
    let mut out = PointwiseForm::zero(a.n);
    for (k, c) in &a.coeffs {
        if !k.theta {
            out.add_term(k.with_theta(), *c);
        }
    }
    out
}

/// Splits into horizontal part and `θ`-part.
pub fn split_vertical(a: &PointwiseForm) -> (PointwiseForm, PointwiseForm) {
    (a.filter(|k| !k.theta), a.filter(|k| k.theta))
}

/// Complex structure on forms: multiplies an `(i,j)` monomial by `iⁱ⁻ʲ`.
pub fn j_action(a: &PointwiseForm) -> PointwiseForm {
    a.map_coeffs(|k, c| c * i_pow(k.holo_degree() as i64 - k.anti_degree() as i64))
}

pub(crate) fn i_pow(e: i64) -> C64 {
    match e.rem_euclid(4) {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

pub fn bidegree_split(a: &PointwiseForm) -> BTreeMap<Bidegree, PointwiseForm> {
    let mut out: BTreeMap<Bidegree, PointwiseForm> = BTreeMap::new();
    for (k, c) in &a.coeffs {
        out.entry(k.bidegree()).or_insert_with(|| PointwiseForm::zero(a.n)).add_term(*k, *c);
    }
    out
}

/// Complex conjugation (`εʲ ↔ ε̄ʲ`, coefficients conjugated).
pub fn conjugate(a: &PointwiseForm) -> PointwiseForm {
    let n = a.n;
    let mut out = PointwiseForm::zero(n);
    for (k, c) in &a.coeffs {
        let mapped: Vec<usize> = k
            .positions(n)
            .into_iter()
            .map(|p| if p == 0 { 0 } else if p <= n { p + n } else { p - n })
            .collect();
        let (idx, sign) = CoframeIndex::from_positions(&mapped, n).expect("conjugation is a bijection");
        out.add_term(idx, c.conj() * sign);
    }
    out
}

/// Hermitian pointwise inner product `⟨a, b⟩`, conjugate-linear in `b`.
pub fn inner(a: &PointwiseForm, b: &PointwiseForm) -> C64 {
    a.coeffs.iter().map(|(k, c)| c * b.coeff(k).conj() * k.norm_sq()).sum()
}

pub fn norm(a: &PointwiseForm) -> f64 {
    inner(a, a).re.max(0.0).sqrt()
}

/// Complex-bilinear extension of the metric to 1-forms, by coframe position.
fn bilinear_one_forms(p: usize, q: usize, n: usize) -> C64 {
    match (p, q) {
        (0, 0) => ONE,
        (0, _) | (_, 0) => ZERO,
        _ if p <= n && q > n && q - n == p => C64::new(2.0, 0.0),
        _ if q <= n && p > n && p - n == q => C64::new(2.0, 0.0),
        _ => ZERO,
    }
}

fn bilinear_monomials(a: &CoframeIndex, b: &CoframeIndex, n: usize) -> C64 {
    let pa = a.positions(n);
    let pb = b.positions(n);
    if pa.len() != pb.len() {
        return ZERO;
    }
    if pa.is_empty() {
        return ONE;
    }
    let k = pa.len();
    DMatrix::from_fn(k, k, |r, c| bilinear_one_forms(pa[r], pb[c], n)).determinant()
}

/// Matrix of a linear map on forms, between monomial lists, in orthonormal
/// (`normalized`) or raw monomial coordinates. Components of the image outside
/// `target` are reported as an error.
pub fn matrix_of(
    n: usize,
    source: &[CoframeIndex],
    target: &[CoframeIndex],
    normalized: bool,
    f: impl Fn(&PointwiseForm) -> PointwiseForm,
) -> Result<DMatrix<C64>> {
    let mut m = DMatrix::zeros(target.len(), source.len());
    let pos: BTreeMap<CoframeIndex, usize> = target.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    for (col, s) in source.iter().enumerate() {
        let scale = if normalized { 1.0 / s.norm_sq().sqrt() } else { 1.0 };
        let image = f(&PointwiseForm::monomial(n, *s, C64::new(scale, 0.0)));
        for (k, c) in image.terms() {
            let row = *pos.get(k).ok_or_else(|| {
                Error::Internal(format!("image of {s} has a component on {k} outside the target"))
            })?;
            m[(row, col)] = if normalized { c * k.norm_sq().sqrt() } else { *c };
        }
    }
    Ok(m)
}

/// Pointwise Lefschetz and Hodge structure for a fixed `dθ`.
#[derive(Clone, Debug)]
pub struct ContactAlgebra {
    n: usize,
    dtheta: PointwiseForm,
    volume: PointwiseForm,
}

impl ContactAlgebra {
    /// Standard structure `dθ = Σ eʲ∧fʲ = (i/2) Σ εʲ∧ε̄ʲ`.
    pub fn standard(n: usize) -> Result<Self> {
        check_n(n)?;
        let mut dtheta = PointwiseForm::zero(n);
        for j in 1..=n {
            dtheta = dtheta + wedge(&PointwiseForm::e(n, j), &PointwiseForm::f(n, j))?;
        }
        Self::with_dtheta(dtheta)
    }

    /// Uses a caller-supplied horizontal 2-form for `dθ`.
    pub fn with_dtheta(dtheta: PointwiseForm) -> Result<Self> {
        let n = dtheta.n;
        check_n(n)?;
        if dtheta.terms().any(|(k, _)| k.degree() != 2 || k.has_theta()) {
            return Err(Error::InvalidParameter("dθ must be a horizontal 2-form".into()));
        }
        let mut volume = PointwiseForm::theta(n);
        for j in 1..=n {
            volume = wedge(&volume, &wedge(&PointwiseForm::e(n, j), &PointwiseForm::f(n, j))?)?;
        }
        Ok(ContactAlgebra { n, dtheta, volume })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dtheta(&self) -> &PointwiseForm {
        &self.dtheta
    }

    /// Positive volume form `θ∧e¹∧f¹∧…∧eⁿ∧fⁿ`.
    pub fn volume_form(&self) -> &PointwiseForm {
        &self.volume
    }

    /// `L a = dθ ∧ a`.
    pub fn lefschetz_l(&self, a: &PointwiseForm) -> PointwiseForm {
        wedge(&self.dtheta, a).expect("same n")
    }

    /// Matrix of `L` from degree `k` to `k+2` on the given monomial lists.
    pub fn l_matrix(&self, source: &[CoframeIndex], target: &[CoframeIndex]) -> DMatrix<C64> {
        matrix_of(self.n, source, target, true, |f| self.lefschetz_l(f)).expect("L preserves the θ-flag")
    }

    /// `Λ`, the pointwise adjoint of `L`.
    pub fn lefschetz_lambda(&self, a: &PointwiseForm) -> PointwiseForm {
        let mut out = PointwiseForm::zero(self.n);
        for k in 2..=2 * self.n + 1 {
            let part = a.part(k);
            if part.is_zero() {
                continue;
            }
            let src = monomials(self.n, k);
            let tgt = monomials(self.n, k - 2);
            let lam = self.l_matrix(&tgt, &src).adjoint();
            let v = lam * part.to_vector(&src, true);
            out = out + PointwiseForm::from_vector(self.n, &tgt, &v, true);
        }
        out
    }

    /// Orthogonal projector onto primitive horizontal `k`-forms, orthonormal
    /// coordinates over `horizontal_monomials(n, k)`.
    ///
    /// `⋀ᵏ = P ⊕ L⋀ᵏ⁻²` orthogonally for `k ≤ n`, so `P = 1 - L(ΛL)⁻¹Λ`.
    pub fn primitive_projector(&self, k: usize) -> DMatrix<C64> {
        let basis = horizontal_monomials(self.n, k);
        let dim = basis.len();
        if k > self.n {
            return DMatrix::zeros(dim, dim);
        }
        if k < 2 {
            return DMatrix::identity(dim, dim);
        }
        let lower = horizontal_monomials(self.n, k - 2);
        let l = self.l_matrix(&lower, &basis);
        let gram = l.adjoint() * &l;
        let inv = gram.lu().solve(&l.adjoint()).expect("L is injective below middle degree");
        DMatrix::identity(dim, dim) - &l * inv
    }

    /// Orthogonal projector onto `ker L` in horizontal degree `k`.
    pub fn kernel_l_projector(&self, k: usize) -> DMatrix<C64> {
        let basis = horizontal_monomials(self.n, k);
        let dim = basis.len();
        if k + 2 > 2 * self.n {
            return DMatrix::identity(dim, dim);
        }
        if k + 1 < self.n {
            return DMatrix::zeros(dim, dim);
        }
        let upper = horizontal_monomials(self.n, k + 2);
        let l = self.l_matrix(&basis, &upper);
        let gram = &l * l.adjoint();
        let inv = gram.lu().solve(&l).expect("L is surjective from degree n-1 up");
        DMatrix::identity(dim, dim) - l.adjoint() * inv
    }

    /// Fiberwise orthogonal projection onto primitive horizontal forms; the
    /// `θ`-component is discarded first (see [`split_vertical`]).
    pub fn primitive_projection(&self, a: &PointwiseForm) -> PointwiseForm {
        let (horizontal, _) = split_vertical(a);
        let mut out = PointwiseForm::zero(self.n);
        for k in 0..=2 * self.n {
            let part = horizontal.part(k);
            if part.is_zero() {
                continue;
            }
            let basis = horizontal_monomials(self.n, k);
            let v = self.primitive_projector(k) * part.to_vector(&basis, true);
            out = out + PointwiseForm::from_vector(self.n, &basis, &v, true);
        }
        out
    }

    /// Hodge star of a single monomial: always a multiple of one monomial.
    pub fn star_monomial(&self, idx: &CoframeIndex) -> (CoframeIndex, C64) {
        let n = self.n;
        let partner = idx.swapped();
        let taken = partner.positions(n);
        let rest: Vec<usize> = (0..=2 * n).filter(|p| !taken.contains(p)).collect();
        let (comp, _) = CoframeIndex::from_positions(&rest, n).expect("complement is distinct");
        let mut all = taken.clone();
        all.extend(&rest);
        let (top, sign) = CoframeIndex::from_positions(&all, n).expect("complement is distinct");
        let vol = self.volume.coeff(&top);
        let g = bilinear_monomials(&partner, idx, n);
        (comp, g * vol / sign)
    }

    /// Hodge star, characterized by `a ∧ ⋆b̄ = ⟨a, b⟩ vol`.
    pub fn hodge_star(&self, a: &PointwiseForm) -> PointwiseForm {
        let mut out = PointwiseForm::zero(self.n);
        for (k, c) in a.terms() {
            let (img, s) = self.star_monomial(k);
            out.add_term(img, c * s);
        }
        out
    }

    /// Inverse of the star. In odd dimension `⋆⋆ = 1`.
    pub fn hodge_star_inverse(&self, a: &PointwiseForm) -> PointwiseForm {
        self.hodge_star(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: &PointwiseForm, b: &PointwiseForm) -> bool {
        a.max_abs_diff(b) < 1e-14
    }

    #[test]
    fn index_validation() {
        assert!(CoframeIndex::new(false, &[1, 1], &[], 2).is_err());
        assert!(CoframeIndex::new(false, &[2, 1], &[], 2).is_err());
        assert!(CoframeIndex::new(false, &[3], &[], 2).is_err());
        let idx = CoframeIndex::new(true, &[1, 2], &[2], 2).unwrap();
        assert_eq!(idx.degree(), 4);
        assert_eq!(idx.holo(), vec![1, 2]);
        assert_eq!(idx.positions(2), vec![0, 1, 2, 4]);
    }

    #[test]
    fn monomial_counts() {
        for n in 1..=3 {
            let total: usize = (0..=2 * n + 1).map(|k| monomials(n, k).len()).sum();
            assert_eq!(total, 1 << (2 * n + 1));
        }
        assert_eq!(monomials(1, 1), vec![CoframeIndex::eps(1), CoframeIndex::eps_bar(1), CoframeIndex::theta()]);
    }

    #[test]
    fn wedge_examples() {
        let n = 1;
        let e1 = PointwiseForm::eps(n, 1);
        let eb = PointwiseForm::eps_bar(n, 1);
        assert!(wedge(&e1, &e1).unwrap().is_zero());
        let te = wedge(&PointwiseForm::theta(n), &e1).unwrap();
        assert_eq!(te.coeff(&CoframeIndex::eps(1).with_theta()), ONE);
        let lhs = wedge(&(e1.clone() + eb.clone()), &eb).unwrap();
        assert!(close(&lhs, &wedge(&e1, &eb).unwrap()));
        assert!(matches!(
            wedge(&e1, &PointwiseForm::eps(2, 1)),
            Err(Error::DimensionMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn interior_examples() {
        let n = 1;
        let te = wedge(&PointwiseForm::theta(n), &PointwiseForm::eps(n, 1)).unwrap();
        assert!(close(&interior_t(&te), &PointwiseForm::eps(n, 1)));
        let ee = wedge(&PointwiseForm::eps(n, 1), &PointwiseForm::eps_bar(n, 1)).unwrap();
        assert!(interior_t(&ee).is_zero());
        assert!(close(&interior_t(&PointwiseForm::theta(n)), &PointwiseForm::one(n)));
    }

    #[test]
    fn lefschetz_n1() {
        // dθ(X, Y) = 1 with e, f dual to X, Y: dθ = e∧f = (i/2) ε∧ε̄.
        let alg = ContactAlgebra::standard(1).unwrap();
        let ee = CoframeIndex::new(false, &[1], &[1], 1).unwrap();
        let l1 = alg.lefschetz_l(&PointwiseForm::one(1));
        assert!(close(&l1, &PointwiseForm::monomial(1, ee, c(0.0, 0.5))));
        assert!(alg.lefschetz_l(&PointwiseForm::eps(1, 1)).is_zero());
        assert!(alg.lefschetz_l(&l1).is_zero());
    }

    #[test]
    fn lambda_n1_from_gram_oracle() {
        // Adjoint of L on the one-dimensional (1,1) space: Λ(ε∧ε̄) = conj(i/2)·|ε∧ε̄|² = -2i.
        let alg = ContactAlgebra::standard(1).unwrap();
        let ee = PointwiseForm::monomial(1, CoframeIndex::new(false, &[1], &[1], 1).unwrap(), ONE);
        assert!(close(&alg.lefschetz_lambda(&ee), &PointwiseForm::scalar(1, c(0.0, -2.0))));
        assert!(alg.lefschetz_lambda(&PointwiseForm::eps(1, 1)).is_zero());
        let tee = theta_wedge(&ee);
        assert!(close(&alg.lefschetz_lambda(&tee), &(PointwiseForm::theta(1) * c(0.0, -2.0))));
    }

    #[test]
    fn primitive_examples() {
        let alg = ContactAlgebra::standard(1).unwrap();
        let e1 = PointwiseForm::eps(1, 1);
        assert!(close(&alg.primitive_projection(&e1), &e1));
        let ee = PointwiseForm::monomial(1, CoframeIndex::new(false, &[1], &[1], 1).unwrap(), ONE);
        assert!(alg.primitive_projection(&ee).is_zero());
        let ldt = alg.lefschetz_l(&PointwiseForm::scalar(1, c(3.0, -1.0)));
        assert!(alg.primitive_projection(&ldt).is_zero());
        // θ-part is discarded
        let mixed = e1.clone() + PointwiseForm::theta(1);
        assert!(close(&alg.primitive_projection(&mixed), &e1));
    }

    #[test]
    fn primitive_n2_is_orthogonal_to_image_of_l() {
        let alg = ContactAlgebra::standard(2).unwrap();
        let a = PointwiseForm::monomial(2, CoframeIndex::new(false, &[1], &[1], 2).unwrap(), ONE);
        let p = alg.primitive_projection(&a);
        assert!(!p.is_zero());
        assert!(alg.lefschetz_lambda(&p).max_abs_diff(&PointwiseForm::zero(2)) < 1e-14);
        let b = alg.lefschetz_l(&PointwiseForm::one(2));
        assert!(inner(&p, &b).norm() < 1e-14);
        // P(a + L c) = P(a)
        let shifted = a + b * c(0.3, 2.0);
        assert!(close(&alg.primitive_projection(&shifted), &p));
    }

    #[test]
    fn star_examples() {
        let alg = ContactAlgebra::standard(1).unwrap();
        assert!(close(&alg.hodge_star(&PointwiseForm::one(1)), alg.volume_form()));
        let e1 = PointwiseForm::eps(1, 1);
        assert!(close(&alg.hodge_star(&alg.hodge_star(&e1)), &e1));
        let ef = wedge(&PointwiseForm::e(1, 1), &PointwiseForm::f(1, 1)).unwrap();
        assert!(close(&alg.hodge_star(&PointwiseForm::theta(1)), &ef));
        // ⟨θ, θ⟩ = 1 reproduces the volume
        let th = PointwiseForm::theta(1);
        let lhs = wedge(&th, &alg.hodge_star(&conjugate(&th))).unwrap();
        assert!(close(&lhs, alg.volume_form()));
    }

    #[test]
    fn j_and_bidegree_examples() {
        let n = 1;
        let e1 = PointwiseForm::eps(n, 1);
        let eb = PointwiseForm::eps_bar(n, 1);
        assert!(close(&j_action(&e1), &(e1.clone() * I)));
        assert!(close(&j_action(&eb), &(eb.clone() * -I)));
        let ee = wedge(&e1, &eb).unwrap();
        assert!(close(&j_action(&ee), &ee));

        let split = bidegree_split(&(e1.clone() + eb.clone()));
        assert_eq!(split.len(), 2);
        assert!(close(&split[&Bidegree { i: 1, j: 0, vertical: false }], &e1));
        assert!(close(&split[&Bidegree { i: 0, j: 1, vertical: false }], &eb));
        let te = theta_wedge(&e1);
        let split = bidegree_split(&te);
        assert!(close(&split[&Bidegree { i: 1, j: 0, vertical: true }], &te));
        assert!(bidegree_split(&PointwiseForm::zero(n)).is_empty());
    }

    #[test]
    fn sl2_commutator_on_all_monomials() {
        for n in 1..=3 {
            let alg = ContactAlgebra::standard(n).unwrap();
            for k in 0..=2 * n {
                for m in horizontal_monomials(n, k) {
                    let a = PointwiseForm::monomial(n, m, ONE);
                    let comm = alg.lefschetz_l(&alg.lefschetz_lambda(&a)) - alg.lefschetz_lambda(&alg.lefschetz_l(&a));
                    let expected = a * C64::new(k as f64 - n as f64, 0.0);
                    assert!(comm.max_abs_diff(&expected) < 1e-12, "n={n} k={k} {m}");
                }
            }
        }
    }

    #[test]
    fn l_is_an_isomorphism_around_middle_degree() {
        for n in 1..=3 {
            let alg = ContactAlgebra::standard(n).unwrap();
            let src = horizontal_monomials(n, n - 1);
            let tgt = horizontal_monomials(n, n + 1);
            assert_eq!(src.len(), tgt.len());
            let l = alg.l_matrix(&src, &tgt);
            let sv = l.singular_values();
            assert!(sv.iter().all(|s| *s > 1e-8), "n={n}");
        }
    }

    #[test]
    fn lambda_is_star_conjugate_of_l() {
        for n in 1..=3 {
            let alg = ContactAlgebra::standard(n).unwrap();
            for k in 0..=2 * n + 1 {
                for m in monomials(n, k) {
                    let a = PointwiseForm::monomial(n, m, ONE);
                    let via_star = alg.hodge_star_inverse(&alg.lefschetz_l(&alg.hodge_star(&a)));
                    assert!(via_star.max_abs_diff(&alg.lefschetz_lambda(&a)) < 1e-12, "n={n} {m}");
                }
            }
        }
    }

    #[test]
    fn star_maps_primitive_into_theta_ker_l() {
        for n in 1..=3 {
            let alg = ContactAlgebra::standard(n).unwrap();
            for k in 0..=n {
                for m in horizontal_monomials(n, k) {
                    let p = alg.primitive_projection(&PointwiseForm::monomial(n, m, ONE));
                    let s = alg.hodge_star(&p);
                    let (horizontal, _) = split_vertical(&s);
                    assert!(horizontal.is_zero());
                    let residual = alg.lefschetz_l(&interior_t(&s));
                    assert!(residual.max_abs_diff(&PointwiseForm::zero(n)) < 1e-12, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn projectors_are_orthogonal_projectors() {
        for n in 1..=3 {
            let alg = ContactAlgebra::standard(n).unwrap();
            for k in 0..=2 * n {
                for p in [alg.primitive_projector(k), alg.kernel_l_projector(k)] {
                    assert!(crate::linalg::max_abs(&(&p * &p - &p)) < 1e-12);
                    assert!(crate::linalg::max_abs(&(p.adjoint() - &p)) < 1e-12);
                }
            }
        }
    }
}
