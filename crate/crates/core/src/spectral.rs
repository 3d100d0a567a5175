//! Per-block eigenanalysis and executable checks of the kernel, primitivity,
//! Forman-family and eigenvalue statements for the Rumin Laplacian.
//!
//! Every check yields a [`Check`] with a residual and a tolerance; a check
//! passes iff `residual ≤ tolerance`. Dimension comparisons use tolerance 0
//! and report the absolute dimension difference as residual.

use std::fmt::Write as _;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{C64, I};
use crate::linalg::{
    clusters, column_space, hermitian_eigen, hermitian_sqrt, intersection, kernel_threshold, max_abs,
    max_principal_angle, mul, null_space, rank, restrict, round_sig, CMatrix, CLUSTER_REL,
};
use crate::model::{BlockId, ModelKind, ModelManifold};
use crate::operators::{BlockComplex, BlockOperator, GradedSpace};

/// Significant digits kept in `λ₁₀, λ₀₁, ν` tags.
pub const TAG_DIGITS: i32 = 12;

/// Default Forman parameters.
pub const DEFAULT_T_SAMPLES: [f64; 3] = [0.1, 1.0, 10.0];

// ---- tolerances ----------------------------------------------------------

/// Tolerances used by the checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Matrix identities of the complex (`d² = 0`, assemblies).
    pub complex: f64,
    /// CR and Rumin identities on Sasakian models.
    pub sasakian: f64,
    /// Largest principal angle between kernels.
    pub angle: f64,
    /// Residuals of operators applied to harmonic or restricted vectors.
    pub residual: f64,
    /// Relative tolerance for eigenvalue formulas and multiset pairing.
    pub eigen_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { complex: 1e-12, sasakian: 1e-11, angle: 1e-8, residual: 1e-10, eigen_rel: 1e-9 }
    }
}

impl Tolerances {
    /// Same tolerance for every numerical check.
    pub fn uniform(t: f64) -> Self {
        Tolerances { complex: t, sasakian: t, angle: t, residual: t, eigen_rel: t }
    }
}

// ---- reports -------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// Counts toward the verdict.
    Check,
    /// Reported for information; never affects the verdict.
    Diagnostic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The identity or statement being tested.
    pub identity: String,
    pub kind: CheckKind,
    pub block: Option<String>,
    pub degree: Option<usize>,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: &str, identity: &str, residual: f64, tolerance: f64) -> Self {
        Check {
            name: name.to_string(),
            identity: identity.to_string(),
            kind: CheckKind::Check,
            block: None,
            degree: None,
            residual,
            tolerance,
            passed: residual.is_finite() && residual <= tolerance,
            detail: None,
        }
    }

    /// Dimension or count equality; residual is the absolute difference.
    pub fn count(name: &str, identity: &str, left: usize, right: usize) -> Self {
        Check::new(name, identity, left.abs_diff(right) as f64, 0.0).with_detail(format!("{left} vs {right}"))
    }

    pub fn at(mut self, block: BlockId, degree: usize) -> Self {
        self.block = Some(block.to_string());
        self.degree = Some(degree);
        self
    }

    pub fn in_block(mut self, block: BlockId) -> Self {
        self.block = Some(block.to_string());
        self
    }

    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree = Some(degree);
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn diagnostic(mut self) -> Self {
        self.kind = CheckKind::Diagnostic;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub suite: String,
    pub model: ModelKind,
    pub max_weight: usize,
    pub tolerances: Tolerances,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(suite: &str, model: &ModelManifold, max_weight: usize, tolerances: Tolerances) -> Self {
        VerificationReport {
            schema: 1,
            suite: suite.to_string(),
            model: model.kind(),
            max_weight,
            tolerances,
            checks: Vec::new(),
        }
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    /// True iff every non-diagnostic check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.kind == CheckKind::Diagnostic || c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.kind == CheckKind::Check && !c.passed).collect()
    }

    /// Checks whose name starts with `prefix`.
    pub fn named<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.name.starts_with(prefix))
    }

    pub fn max_residual(&self, prefix: &str) -> f64 {
        self.named(prefix).map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

// ---- spectra -------------------------------------------------------------

/// Laplacians that can be tabulated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "operator", rename_all = "kebab-case")]
pub enum LaplacianKind {
    /// `Δ_RN` on `Eᵏ`.
    Rumin,
    /// `Δ_dR` on `Ωᵏ`.
    DeRham,
    /// `Δ_t` of `d_t = d_0 + t d_b + t² d_T`.
    Forman { t: f64 },
    /// `Δ_b` on `Ωᵏ`.
    Tangential,
}

impl LaplacianKind {
    pub fn label(&self) -> String {
        match self {
            LaplacianKind::Rumin => "delta-rn".into(),
            LaplacianKind::DeRham => "delta-dr".into(),
            LaplacianKind::Forman { t } => format!("delta-t(t={t})"),
            LaplacianKind::Tangential => "delta-b".into(),
        }
    }

    pub fn assemble(&self, complex: &BlockComplex, k: usize) -> Result<BlockOperator> {
        match self {
            LaplacianKind::Rumin => complex.laplacian_rn(k),
            LaplacianKind::DeRham => complex.laplacian_dr(k),
            LaplacianKind::Forman { t } => complex.laplacian_t(k, *t),
            LaplacianKind::Tangential => complex.laplacian_b(k),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub degree: usize,
    pub block: BlockId,
    pub eigenvalue: f64,
    pub multiplicity: usize,
    /// `(i,j)` or `θ(i,j)` when the eigenspace has pure bidegree, else `mixed`.
    pub bidegree: String,
    /// `L_T = √−1 ν` on the eigenspace.
    pub nu: Option<f64>,
    pub lambda10: Option<f64>,
    pub lambda01: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub operator: String,
    pub entries: Vec<SpectrumEntry>,
}

impl SpectrumTable {
    pub fn eigenvalues(&self, degree: usize) -> Vec<(f64, usize)> {
        self.entries.iter().filter(|e| e.degree == degree).map(|e| (e.eigenvalue, e.multiplicity)).collect()
    }

    pub fn kernel_dim(&self, degree: usize) -> usize {
        self.entries.iter().filter(|e| e.degree == degree && e.eigenvalue == 0.0).map(|e| e.multiplicity).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV with 17 significant digits; empty cells for undefined tags.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,block,eigenvalue,multiplicity,nu,lambda10,lambda01\n");
        let cell = |x: Option<f64>| x.map(|v| format!("{v:.16e}")).unwrap_or_default();
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{:.16e},{},{},{},{}",
                e.degree,
                e.block,
                e.eigenvalue,
                e.multiplicity,
                cell(e.nu),
                cell(e.lambda10),
                cell(e.lambda01)
            );
        }
        out
    }
}

/// Plain eigendecomposition of a Hermitian block operator, clustered.
pub fn block_spectrum(op: &BlockOperator) -> Result<SpectrumTable> {
    if !op.is_square() {
        return Err(Error::InvalidParameter("spectrum of a non-square operator".into()));
    }
    let (values, vectors) = hermitian_eigen(&op.matrix)?;
    let thr = kernel_threshold(&values);
    let mut entries = Vec::new();
    for range in clusters(&values, CLUSTER_REL) {
        let mean = values[range.clone()].iter().sum::<f64>() / range.len() as f64;
        let basis = op.source.embedding() * vectors.columns(range.start, range.len());
        entries.push(SpectrumEntry {
            degree: op.source.degree,
            block: op.source.block,
            eigenvalue: if mean.abs() <= thr { 0.0 } else { mean },
            multiplicity: range.len(),
            bidegree: bidegree_tag(&op.source, &basis),
            nu: None,
            lambda10: None,
            lambda01: None,
        });
    }
    Ok(SpectrumTable { operator: String::new(), entries })
}

/// Eigenspaces of a Laplacian jointly with `−√−1 L_T` and, on `Eᵏ` below the
/// middle degree of a Sasakian model, with `Δ_{∂_N}` and `Δ_{∂̄_N}`.
pub fn tagged_block_spectrum(complex: &BlockComplex, kind: LaplacianKind, k: usize) -> Result<SpectrumTable> {
    let delta = kind.assemble(complex, k)?;
    let space = delta.source.clone();
    let lie = if kind == LaplacianKind::Rumin { complex.lie_t_rumin(k)? } else { complex.lie_t(k)? };
    let nu_op = &lie.matrix * C64::new(0.0, -1.0);
    let mut ops: Vec<CMatrix> = vec![delta.matrix.clone()];
    let nu_commutes = commutator_norm(&delta.matrix, &nu_op) <= 1e-9 * delta.max_abs().max(1.0);
    if nu_commutes {
        ops.push(nu_op);
    }
    let with_q = kind == LaplacianKind::Rumin && k < complex.n() && complex.frame().is_sasakian();
    if with_q {
        ops.push(complex.laplacian_del_n(k)?.matrix);
        ops.push(complex.laplacian_delbar_n(k)?.matrix);
    }
    let refs: Vec<&CMatrix> = ops.iter().collect();
    let spaces = crate::linalg::joint_decomposition(&refs)?;
    let embed = space.embedding();
    let mut entries: Vec<SpectrumEntry> = spaces
        .iter()
        .map(|s| {
            let tag = |i: usize| round_sig(s.tags[i], TAG_DIGITS);
            SpectrumEntry {
                degree: k,
                block: space.block,
                eigenvalue: s.tags[0],
                multiplicity: s.basis.ncols(),
                bidegree: bidegree_tag(&space, &(&embed * &s.basis)),
                nu: nu_commutes.then(|| tag(1)),
                lambda10: with_q.then(|| tag(ops.len() - 2)),
                lambda01: with_q.then(|| tag(ops.len() - 1)),
            }
        })
        .collect();
    entries.sort_by(|a, b| {
        a.eigenvalue
            .total_cmp(&b.eigenvalue)
            .then(a.nu.unwrap_or(0.0).total_cmp(&b.nu.unwrap_or(0.0)))
            .then(a.lambda10.unwrap_or(0.0).total_cmp(&b.lambda10.unwrap_or(0.0)))
    });
    Ok(SpectrumTable { operator: kind.label(), entries })
}

fn bidegree_tag(space: &GradedSpace, full_basis: &CMatrix) -> String {
    let f = space.func_dim;
    let mut weights: Vec<(String, f64)> = Vec::new();
    let mut total = 0.0;
    for (ci, mono) in space.monomials.iter().enumerate() {
        let b = mono.bidegree();
        let label = if b.vertical { format!("θ({},{})", b.i, b.j) } else { format!("({},{})", b.i, b.j) };
        let w: f64 = (0..f)
            .flat_map(|r| full_basis.row(ci * f + r).iter().map(|z| z.norm_sqr()).collect::<Vec<_>>())
            .sum();
        total += w;
        match weights.iter_mut().find(|(l, _)| *l == label) {
            Some(slot) => slot.1 += w,
            None => weights.push((label, w)),
        }
    }
    if total == 0.0 {
        return "empty".into();
    }
    weights
        .into_iter()
        .find(|(_, w)| *w >= (1.0 - 1e-9) * total)
        .map(|(l, _)| l)
        .unwrap_or_else(|| "mixed".into())
}

/// Nonempty blocks of weight `≤ max_weight`, assembled.
pub fn block_complexes(model: &ModelManifold, max_weight: usize) -> Result<Vec<BlockComplex>> {
    model
        .blocks(max_weight)
        .into_iter()
        .filter(|b| !b.is_empty())
        .map(|b| BlockComplex::new(model.frame(), b))
        .collect()
}

/// Maps `f` over the nonempty blocks, in parallel when enabled; results keep block order.
pub fn per_block<T, F>(model: &ModelManifold, max_weight: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&BlockComplex) -> Result<T> + Sync + Send,
{
    let blocks: Vec<_> = model.blocks(max_weight).into_iter().filter(|b| !b.is_empty()).collect();
    let run = |b: crate::model::FunctionBlock| BlockComplex::new(model.frame(), b).and_then(|c| f(&c));
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        blocks.into_par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        blocks.into_iter().map(run).collect()
    }
}

/// Tagged spectrum over all blocks up to `max_weight`, ordered by degree then block.
pub fn spectrum(model: &ModelManifold, max_weight: usize, kind: LaplacianKind, degrees: &[usize]) -> Result<SpectrumTable> {
    let tables = per_block(model, max_weight, |c| {
        degrees.iter().map(|k| tagged_block_spectrum(c, kind, *k)).collect::<Result<Vec<_>>>()
    })?;
    let mut entries = Vec::new();
    for k in degrees {
        for per_degree in &tables {
            for t in per_degree {
                entries.extend(t.entries.iter().filter(|e| e.degree == *k).cloned());
            }
        }
    }
    Ok(SpectrumTable { operator: kind.label(), entries })
}

/// Orthonormal kernel of a Hermitian positive semidefinite operator.
#[derive(Clone, Debug)]
pub struct KernelBasis {
    pub degree: usize,
    pub block: BlockId,
    /// Columns in the operator's own coordinates.
    pub vectors: CMatrix,
    pub tolerance: f64,
}

impl KernelBasis {
    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }
}

/// Eigenvectors with eigenvalue `≤ tol` (default: the kernel threshold policy).
pub fn kernel(op: &BlockOperator, tol: Option<f64>) -> Result<KernelBasis> {
    let (values, vectors) = hermitian_eigen(&op.matrix)?;
    let tolerance = tol.unwrap_or_else(|| kernel_threshold(&values));
    let keep: Vec<usize> = (0..values.len()).filter(|i| values[*i] <= tolerance).collect();
    Ok(KernelBasis { degree: op.source.degree, block: op.source.block, vectors: vectors.select_columns(&keep), tolerance })
}

// ---- Q-decomposition -----------------------------------------------------

/// A joint eigenspace `Q^k(λ₁₀, λ₀₁)` of `Δ_{∂_N}` and `Δ_{∂̄_N}` on `Eᵏ`.
#[derive(Clone, Debug)]
pub struct QSpace {
    pub lambda10: f64,
    pub lambda01: f64,
    /// Orthonormal columns in `Eᵏ` coordinates.
    pub basis: CMatrix,
}

/// Simultaneous eigenspaces of `(Δ_{∂_N}, Δ_{∂̄_N})` on `Eᵏ`, `k ≤ n−1`.
pub fn q_decomposition(complex: &BlockComplex, k: usize) -> Result<Vec<QSpace>> {
    if k + 1 > complex.n() {
        return Err(Error::InvalidParameter(format!("Q-decomposition needs k ≤ n−1, got {k}")));
    }
    let a = complex.laplacian_del_n(k)?.matrix;
    let b = complex.laplacian_delbar_n(k)?.matrix;
    let comm = commutator_norm(&a, &b);
    if comm > 1e-9 * max_abs(&a).max(max_abs(&b)).max(1.0) {
        return Err(Error::Internal(format!("Δ_∂N and Δ_∂̄N do not commute in degree {k} (residual {comm:e})")));
    }
    Ok(crate::linalg::joint_decomposition(&[&a, &b])?
        .into_iter()
        .map(|s| QSpace {
            lambda10: round_sig(s.tags[0], TAG_DIGITS),
            lambda01: round_sig(s.tags[1], TAG_DIGITS),
            basis: s.basis,
        })
        .collect())
}

// ---- helpers -------------------------------------------------------------

fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a * b - b * a))
}

/// `‖A V − c V‖`, largest column norm.
fn eigen_residual(a: &CMatrix, v: &CMatrix, c: f64) -> f64 {
    if v.ncols() == 0 {
        return 0.0;
    }
    let r = a * v - v * C64::new(c, 0.0);
    r.column_iter().map(|col| col.norm()).fold(0.0, f64::max)
}

/// Largest column norm of `A V`.
fn apply_norm(a: &CMatrix, v: &CMatrix) -> f64 {
    if v.ncols() == 0 || a.nrows() == 0 {
        return 0.0;
    }
    (a * v).column_iter().map(|col| col.norm()).fold(0.0, f64::max)
}

fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

fn hstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut m = zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    m.view_mut((0, a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    m
}

fn vstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut m = zeros(a.nrows() + b.nrows(), a.ncols());
    m.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    m.view_mut((a.nrows(), 0), (b.nrows(), b.ncols())).copy_from(b);
    m
}

fn collect_checks(per_block: Vec<Vec<Check>>) -> Vec<Check> {
    per_block.into_iter().flatten().collect()
}

// ---- complex property and assemblies ------------------------------------

pub const FORMAN_SQUARE_SAMPLES: [f64; 4] = [0.0, 0.37, 1.0, 2.0];

/// `d² = 0`, `d_N² = 0`, `d_t² = 0`, `d = d_0 + d_b + d_T`, and the two block
/// assemblies of `Δ_dR`.
pub fn verify_complex_property(model: &ModelManifold, max_weight: usize, tol: &Tolerances) -> Result<VerificationReport> {
    let checks = per_block(model, max_weight, |c| {
        let id = c.block().id;
        let top = c.top_degree();
        let mut out = Vec::new();
        for k in 0..top {
            let dd = c.d(k + 1)?.compose(&c.d(k)?)?.max_abs();
            out.push(Check::new("complex.d_squared", "d∘d = 0", dd, tol.complex).at(id, k));
            let nn = c.d_rescaled(k + 1)?.compose(&c.d_rescaled(k)?)?.max_abs();
            out.push(Check::new("complex.dn_squared", "d_N∘d_N = 0", nn, tol.complex).at(id, k));
            for t in FORMAN_SQUARE_SAMPLES {
                let tt = c.forman_d(k + 1, t)?.compose(&c.forman_d(k, t)?)?.max_abs();
                out.push(
                    Check::new("complex.dt_squared", "d_t∘d_t = 0", tt, tol.complex)
                        .at(id, k)
                        .with_detail(format!("t = {t}")),
                );
            }
        }
        for k in 0..=top {
            let sum = c.d0(k)?.add(&c.db(k)?)?.add(&c.d_reeb(k)?)?;
            let r = c.d(k)?.sub(&sum)?.max_abs();
            out.push(Check::new("complex.d_split", "d = d_0 + d_b + d_T", r, tol.complex).at(id, k));
            let lap = c.laplacian_dr(k)?;
            let generic = c.laplacian_dr_split(k, false)?;
            out.push(
                Check::new(
                    "complex.laplacian_blocks",
                    "Δ_dR = [[Δ_b + L_T*L_T + LΛ, [d_b*, L] + [d_b, L_T*]], [adjoint, Δ_b + L_T L_T* + ΛL]]",
                    lap.sub(&generic)?.max_abs(),
                    tol.complex,
                )
                .at(id, k),
            );
            if c.frame().is_sasakian() {
                let sas = c.laplacian_dr_split(k, true)?;
                out.push(
                    Check::new(
                        "complex.laplacian_blocks_cr",
                        "Δ_dR off-diagonal blocks = √−1(∂_b − ∂̄_b) and its adjoint",
                        lap.sub(&sas)?.max_abs(),
                        tol.complex,
                    )
                    .at(id, k),
                );
            }
        }
        Ok(out)
    })?;
    let mut report = VerificationReport::new("complex", model, max_weight, *tol);
    report.extend(collect_checks(checks));
    Ok(report)
}

// ---- Sasakian identities -------------------------------------------------

/// Horizontal pieces `∂_b, ∂̄_b, L, Λ` as matrices between `Ω_Hʲ` spaces, with
/// out-of-range degrees giving zero matrices.
struct Horizontal<'a> {
    c: &'a BlockComplex,
}

impl Horizontal<'_> {
    fn dim(&self, j: isize) -> usize {
        if j < 0 || j as usize > 2 * self.c.n() {
            0
        } else {
            self.c.horizontal(j as usize).dim()
        }
    }

    fn piece(&self, j: isize, to: isize, f: impl Fn(usize) -> Result<BlockOperator>) -> Result<CMatrix> {
        let (r, c) = (self.dim(to), self.dim(j));
        if r == 0 || c == 0 {
            return Ok(zeros(r, c));
        }
        let (ju, tu) = (j as usize, to as usize);
        Ok(self.c.compress(&f(ju)?, &self.c.horizontal(ju), &self.c.horizontal(tu)).matrix)
    }

    fn del(&self, j: isize) -> Result<CMatrix> {
        self.piece(j, j + 1, |k| self.c.del_b(k))
    }

    fn delbar(&self, j: isize) -> Result<CMatrix> {
        self.piece(j, j + 1, |k| self.c.delbar_b(k))
    }

    fn l(&self, j: isize) -> Result<CMatrix> {
        self.piece(j, j + 2, |k| self.c.lefschetz(k))
    }

    fn lambda(&self, j: isize) -> Result<CMatrix> {
        self.piece(j, j - 2, |k| self.c.lefschetz_adjoint(k))
    }
}

/// Kähler-type identities of `∂_b, ∂̄_b`, the Rumin-level commutation and
/// square-root identities, `D` by two formulas, `L_T` commuting with the
/// assembled operators, and Hodge star intertwining `Δ_RN`.
pub fn verify_sasakian_identities(model: &ModelManifold, max_weight: usize, tol: &Tolerances) -> Result<VerificationReport> {
    let checks = per_block(model, max_weight, |c| sasakian_block(c, tol))?;
    let mut report = VerificationReport::new("sasakian", model, max_weight, *tol);
    report.extend(collect_checks(checks));
    Ok(report)
}

fn sasakian_block(c: &BlockComplex, tol: &Tolerances) -> Result<Vec<Check>> {
    let id = c.block().id;
    let n = c.n();
    let h = Horizontal { c };
    let mut out = Vec::new();
    let t = tol.sasakian;
    for j in 0..=(2 * n) as isize {
        // Adjoint identities on Ω_Hʲ.
        let del_star = h.del(j - 1)?.adjoint();
        let delbar_star = h.delbar(j - 1)?.adjoint();
        let comm_l_delbar = (h.lambda(j + 1)? * h.delbar(j)? - h.delbar(j - 2)? * h.lambda(j)?) * I;
        let comm_l_del = (h.lambda(j + 1)? * h.del(j)? - h.del(j - 2)? * h.lambda(j)?) * C64::new(0.0, -1.0);
        out.push(Check::new("sasakian.kahler_del_star", "∂_b* = √−1[Λ, ∂̄_b]", max_abs(&(del_star - comm_l_delbar)), t).at(id, j as usize));
        out.push(Check::new("sasakian.kahler_delbar_star", "∂̄_b* = −√−1[Λ, ∂_b]", max_abs(&(delbar_star - comm_l_del)), t).at(id, j as usize));
        let del = h.del(j)?;
        let delbar = h.delbar(j)?;
        let l_delbar_star = (h.l(j - 1)? * h.delbar(j - 1)?.adjoint() - h.delbar(j + 1)?.adjoint() * h.l(j)?) * I;
        let l_del_star = (h.l(j - 1)? * h.del(j - 1)?.adjoint() - h.del(j + 1)?.adjoint() * h.l(j)?) * C64::new(0.0, -1.0);
        out.push(Check::new("sasakian.kahler_del", "∂_b = √−1[L, ∂̄_b*]", max_abs(&(&del - l_delbar_star)), t).at(id, j as usize));
        out.push(Check::new("sasakian.kahler_delbar", "∂̄_b = −√−1[L, ∂_b*]", max_abs(&(&delbar - l_del_star)), t).at(id, j as usize));
        // Graded commutators of odd operators are anticommutators.
        let a = h.del(j - 1)? * h.delbar(j - 1)?.adjoint() + delbar.adjoint() * &del;
        let b = h.delbar(j - 1)? * h.del(j - 1)?.adjoint() + del.adjoint() * &delbar;
        out.push(Check::new("sasakian.del_delbar_star", "[∂_b, ∂̄_b*] = 0", max_abs(&a), t).at(id, j as usize));
        out.push(Check::new("sasakian.delbar_del_star", "[∂̄_b, ∂_b*] = 0", max_abs(&b), t).at(id, j as usize));
    }
    for k in 0..=n {
        let del = c.del_n(k)?.matrix;
        let delbar = c.delbar_n(k)?.matrix;
        let (mut a, mut b) = (delbar.adjoint() * &del, del.adjoint() * &delbar);
        if k > 0 {
            let (dl, dbl) = (c.del_n(k - 1)?.matrix, c.delbar_n(k - 1)?.matrix);
            a += &dl * dbl.adjoint();
            b += &dbl * dl.adjoint();
        }
        out.push(Check::new("sasakian.rumin_del_delbar_star", "[∂_N, ∂̄_N*] = 0 on Eᵏ, k ≤ n", max_abs(&a), t).at(id, k));
        out.push(Check::new("sasakian.rumin_delbar_del_star", "[∂̄_N, ∂_N*] = 0 on Eᵏ, k ≤ n", max_abs(&b), t).at(id, k));
    }
    for k in 0..n {
        let root = hermitian_sqrt(&c.laplacian_rn(k)?.matrix)?;
        let ld = c.laplacian_del_n(k)?.matrix;
        let lb = c.laplacian_delbar_n(k)?.matrix;
        out.push(Check::new("sasakian.sqrt_laplacian", "√Δ_RN = Δ_∂N + Δ_∂̄N on Eᵏ, k ≤ n−1", max_abs(&(root - &ld - &lb)), t).at(id, k));
        let ilt = c.lie_t_rumin(k)?.matrix * I;
        out.push(Check::new("sasakian.reeb_difference", "√−1 L_T = Δ_∂̄N − Δ_∂N on Eᵏ, k ≤ n−1", max_abs(&(ilt - (&lb - &ld))), t).at(id, k));
        out.push(Check::new("sasakian.half_laplacians_commute", "[Δ_∂N, Δ_∂̄N] = 0", commutator_norm(&ld, &lb), t).at(id, k));
    }
    let d_lift = c.rumin_d_middle()?;
    let d_cr = c.rumin_d_middle_kahler()?;
    out.push(
        Check::new("sasakian.middle_d_formulas", "θ∧(L_T + d_b L⁻¹ d_b) = θ∧(L_T − √−1(∂_b+∂̄_b)(∂_b* − ∂̄_b*)) on Eⁿ", d_lift.sub(&d_cr)?.max_abs(), t)
            .at(id, n),
    );
    // L_T commutes with the assembled operators.
    let top = c.top_degree();
    for k in 0..=top {
        let lt = c.lie_t(k)?.matrix;
        let mut worst: f64 = 0.0;
        let lt_up = if k < top { c.lie_t(k + 1)?.matrix } else { zeros(0, 0) };
        if k < top {
            for op in [c.d(k)?, c.db(k)?, c.d0(k)?, c.d_reeb(k)?, c.theta_wedge(k)?] {
                worst = worst.max(max_abs(&(mul(&lt_up, &op.matrix) - mul(&op.matrix, &lt))));
            }
        }
        if k < 2 * n {
            for op in [c.del_b(k)?, c.delbar_b(k)?] {
                worst = worst.max(max_abs(&(mul(&lt_up, &op.matrix) - mul(&op.matrix, &lt))));
            }
        }
        for op in [c.laplacian_dr(k)?, c.laplacian_b(k)?, c.j_action(k)?] {
            worst = worst.max(commutator_norm(&lt, &op.matrix));
        }
        let lte = c.lie_t_rumin(k)?.matrix;
        worst = worst.max(commutator_norm(&lte, &c.laplacian_rn(k)?.matrix));
        if k < top {
            let dn = c.d_rescaled(k)?.matrix;
            worst = worst.max(max_abs(&(c.lie_t_rumin(k + 1)?.matrix * &dn - &dn * &lte)));
        }
        let star = c.star(k)?.matrix;
        worst = worst.max(max_abs(&(mul(&c.lie_t(top - k)?.matrix, &star) - mul(&star, &lt))));
        out.push(Check::new("sasakian.reeb_commutes", "[L_T, A] = 0 for d, d_b, d_0, d_T, ∂_b, ∂̄_b, θ∧, J, ⋆, d_N, Δ_dR, Δ_b, Δ_RN", worst, t).at(id, k));
        // Hodge star intertwines Δ_RN in complementary degrees.
        let s = c.restrict(&c.star(k)?, &c.rumin(k), &c.rumin(top - k))?.matrix;
        let r = max_abs(&(c.laplacian_rn(top - k)?.matrix * &s - &s * c.laplacian_rn(k)?.matrix));
        out.push(Check::new("sasakian.star_intertwines", "⋆Δ_RN = Δ_RN⋆", r, t).at(id, k));
    }
    Ok(out)
}

// ---- kernel coincidence --------------------------------------------------

/// Kernel dimensions of `Δ_dR` per degree, summed over blocks, as computed by
/// [`verify_kernel_coincidence`].
pub fn kernel_dims(report: &VerificationReport, top: usize) -> Vec<usize> {
    (0..=top)
        .map(|k| {
            report
                .named("kernel.dim_de_rham")
                .filter(|c| c.degree == Some(k))
                .filter_map(|c| c.detail.as_ref()?.split(' ').next()?.parse::<usize>().ok())
                .sum()
        })
        .collect()
}

/// Expected cohomology dimensions of the model with its flat line bundle.
pub fn expected_cohomology(model: &ModelManifold) -> Vec<usize> {
    let b = usize::from(model.character() == 0);
    let top = 2 * model.frame().n() + 1;
    (0..=top).map(|k| if k == 0 || k == top { b } else { 0 }).collect()
}

/// Subspace equality of `Ker Δ_dR` and `Ker Δ_RN`, dimension cross-checks by
/// ranks of `d` and `d_N`, and the intermediate identities satisfied by
/// harmonic forms.
pub fn verify_kernel_coincidence(model: &ModelManifold, max_weight: usize, tol: &Tolerances) -> Result<VerificationReport> {
    let checks = per_block(model, max_weight, |c| kernel_block(c, tol))?;
    let mut report = VerificationReport::new("kernel", model, max_weight, *tol);
    report.extend(collect_checks(checks));
    let top = 2 * model.frame().n() + 1;
    let dims = kernel_dims(&report, top);
    let expected = expected_cohomology(model);
    for k in 0..=top {
        report.checks.push(
            Check::count("kernel.total_dim", "Σ_blocks dim Ker Δ_dR^k = dim Hᵏ(M, E)", dims[k], expected[k]).with_degree(k),
        );
    }
    Ok(report)
}

fn kernel_block(c: &BlockComplex, tol: &Tolerances) -> Result<Vec<Check>> {
    let id = c.block().id;
    let n = c.n();
    let top = c.top_degree();
    let mut out = Vec::new();
    for k in 0..=top {
        let dr = kernel(&c.laplacian_dr(k)?, None)?;
        let rn = kernel(&c.laplacian_rn(k)?, None)?;
        let rn_full = c.rumin(k).embedding() * &rn.vectors;
        // Rank oracles: dim Hᵏ = dim Ker dᵏ − rank dᵏ⁻¹, for d and for d_N.
        let oracle = |d: &dyn Fn(usize) -> Result<BlockOperator>| -> Result<usize> {
            let up = d(k)?;
            let ker = if k == top { up.source.dim() } else { up.source.dim() - rank(&up.matrix) };
            let im = if k == 0 { 0 } else { rank(&d(k - 1)?.matrix) };
            Ok(ker - im)
        };
        let oracle_d = oracle(&|j| c.d(j))?;
        let oracle_n = oracle(&|j| c.d_rescaled(j))?;
        out.push(
            Check::count("kernel.dim_de_rham", "dim Ker Δ_dR = dim Ker dᵏ − rank dᵏ⁻¹", dr.dim(), oracle_d).at(id, k),
        );
        out.push(
            Check::count("kernel.dim_rumin", "dim Ker Δ_RN = dim Ker d_Nᵏ − rank d_Nᵏ⁻¹", rn.dim(), oracle_n).at(id, k),
        );
        match max_principal_angle(&dr.vectors, &rn_full) {
            Some(angle) => out.push(
                Check::new("kernel.principal_angle", "Ker Δ_dR = Ker Δ_RN as subspaces", angle, tol.angle).at(id, k),
            ),
            None => out.push(
                Check::count("kernel.principal_angle", "Ker Δ_dR = Ker Δ_RN as subspaces", dr.dim(), rn.dim()).at(id, k),
            ),
        }
        if rn.dim() == 0 {
            continue;
        }
        let phi = &rn_full;
        let mut steps: Vec<(&str, &str, f64)> = Vec::new();
        steps.push(("kernel.step_reeb", "L_T φ = 0", apply_norm(&c.lie_t(k)?.matrix, phi)));
        steps.push(("kernel.step_laplacian_b", "Δ_b φ = 0", apply_norm(&c.laplacian_b(k)?.matrix, phi)));
        if k <= n {
            if k > 0 {
                steps.push(("kernel.step_db_star", "d_b* φ = 0", apply_norm(&c.db(k - 1)?.matrix.adjoint(), phi)));
            }
            if k + 1 <= 2 * n && k + 1 >= 2 {
                let lam_db = c.lefschetz_adjoint(k + 1)?.matrix * c.db(k)?.matrix;
                steps.push(("kernel.step_lambda_db", "Λ d_b φ = 0", apply_norm(&lam_db, phi)));
            }
            if k == n {
                let f = |op: BlockOperator| op.matrix;
                steps.push(("kernel.step_del", "∂_b φ = 0", apply_norm(&f(c.del_b(k)?), phi)));
                steps.push(("kernel.step_delbar", "∂̄_b φ = 0", apply_norm(&f(c.delbar_b(k)?), phi)));
                if k > 0 {
                    steps.push(("kernel.step_del_star", "∂_b* φ = 0", apply_norm(&f(c.del_b(k - 1)?).adjoint(), phi)));
                    steps.push(("kernel.step_delbar_star", "∂̄_b* φ = 0", apply_norm(&f(c.delbar_b(k - 1)?).adjoint(), phi)));
                }
            }
        }
        for (name, identity, r) in steps {
            out.push(Check::new(name, identity, r, tol.residual).at(id, k));
        }
    }
    Ok(out)
}

// ---- primitivity ---------------------------------------------------------

/// Harmonic forms are primitive (low degrees) or `θ∧`-divisible and
/// `L`-closed (high degrees), and `J` preserves harmonicity.
pub fn verify_primitivity(model: &ModelManifold, max_weight: usize, tol: &Tolerances) -> Result<VerificationReport> {
    let checks = per_block(model, max_weight, |c| {
        let id = c.block().id;
        let n = c.n();
        let mut out = Vec::new();
        for k in 0..=c.top_degree() {
            let lap = c.laplacian_dr(k)?;
            let phi = kernel(&lap, None)?.vectors;
            if phi.ncols() == 0 {
                continue;
            }
            let t = tol.residual;
            if k <= n {
                let it = if k == 0 { 0.0 } else { apply_norm(&c.interior_t(k)?.matrix, &phi) };
                let lam = if k < 2 { 0.0 } else { apply_norm(&c.lefschetz_adjoint(k)?.matrix, &phi) };
                out.push(Check::new("primitivity.interior_t", "ι_T φ = 0 for k ≤ n", it, t).at(id, k));
                out.push(Check::new("primitivity.lambda", "Λ φ = 0 for k ≤ n", lam, t).at(id, k));
            } else {
                let th = apply_norm(&c.theta_wedge(k)?.matrix, &phi);
                let l = apply_norm(&c.lefschetz(k)?.matrix, &phi);
                out.push(Check::new("primitivity.theta", "θ∧φ = 0 for k ≥ n+1", th, t).at(id, k));
                out.push(Check::new("primitivity.lefschetz", "dθ∧φ = 0 for k ≥ n+1", l, t).at(id, k));
            }
            let jphi = c.j_action(k)?.matrix * &phi;
            out.push(Check::new("primitivity.j_harmonic", "Δ_dR(Jφ) = 0", apply_norm(&lap.matrix, &jphi), t).at(id, k));
        }
        Ok(out)
    })?;
    let mut report = VerificationReport::new("primitivity", model, max_weight, *tol);
    report.extend(collect_checks(checks));
    Ok(report)
}

// ---- Forman family -------------------------------------------------------

/// Harmonic forms are killed by `d_0, d_b, d_T` and their adjoints separately,
/// lie in every `Ker Δ_t`, and `∩_t Ker Δ_t` has the dimension of `Ker Δ_dR`.
pub fn verify_forman_family(model: &ModelManifold, max_weight: usize, t_samples: &[f64], tol: &Tolerances) -> Result<VerificationReport> {
    if t_samples.is_empty() || t_samples.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::InvalidParameter("t samples must be finite positive reals".into()));
    }
    let checks = per_block(model, max_weight, |c| {
        let id = c.block().id;
        let top = c.top_degree();
        let mut out = Vec::new();
        for k in 0..=top {
            let lap = c.laplacian_dr(k)?;
            let harmonic = kernel(&lap, None)?;
            let phi = &harmonic.vectors;
            let t = tol.residual;
            if phi.ncols() > 0 {
                let pieces: [(&str, &str, BlockOperator); 3] = [
                    ("forman.d0", "d_0", c.d0(k)?),
                    ("forman.db", "d_b", c.db(k)?),
                    ("forman.dt", "d_T", c.d_reeb(k)?),
                ];
                for (name, label, op) in pieces {
                    out.push(Check::new(name, &format!("{label} φ = 0"), apply_norm(&op.matrix, phi), t).at(id, k));
                }
                if k > 0 {
                    let adj: [(&str, &str, BlockOperator); 3] = [
                        ("forman.d0_star", "d_0", c.d0(k - 1)?),
                        ("forman.db_star", "d_b", c.db(k - 1)?),
                        ("forman.dt_star", "d_T", c.d_reeb(k - 1)?),
                    ];
                    for (name, label, op) in adj {
                        out.push(
                            Check::new(name, &format!("{label}* φ = 0"), apply_norm(&op.matrix.adjoint(), phi), t).at(id, k),
                        );
                    }
                }
            }
            // Sum of normalized positive semidefinite Δ_t has kernel ∩_t Ker Δ_t.
            let mut sum = zeros(lap.matrix.nrows(), lap.matrix.ncols());
            for s in t_samples {
                let lt = c.laplacian_t(k, *s)?;
                if phi.ncols() > 0 {
                    out.push(
                        Check::new("forman.harmonic_in_kernel", "Δ_t φ = 0", apply_norm(&lt.matrix, phi), t)
                            .at(id, k)
                            .with_detail(format!("t = {s}")),
                    );
                }
                sum += &lt.matrix / C64::new(lt.max_abs().max(1.0), 0.0);
            }
            let joint = kernel(&BlockOperator::new(lap.source.clone(), lap.target.clone(), sum)?, None)?;
            out.push(
                Check::count("forman.intersection_dim", "dim ∩_t Ker Δ_t = dim Ker Δ_dR", joint.dim(), harmonic.dim())
                    .at(id, k),
            );
        }
        Ok(out)
    })?;
    let mut report = VerificationReport::new("forman", model, max_weight, *tol);
    report.extend(collect_checks(checks));
    Ok(report)
}

// ---- eigenvalue law ------------------------------------------------------

/// The `(λ₁₀+λ₀₁)²` eigenvalue law: on each `Q^{n−1}(λ₁₀, λ₀₁)` and on its image
/// under `∂_N, ∂̄_N`, the explicit triple computation through `D*D`, bijectivity
/// of the corner maps, positivity on `Im ∂_N + Im ∂̄_N`, and Hodge-star
/// symmetry of spectra. Requires `n = 1`.
pub fn verify_eigenvalue_identity(model: &ModelManifold, max_weight: usize, tol: &Tolerances) -> Result<VerificationReport> {
    require_n1(model)?;
    let checks = per_block(model, max_weight, |c| eigen_block(c, tol))?;
    let mut report = VerificationReport::new("eigenvalue", model, max_weight, *tol);
    report.extend(collect_checks(checks));
    Ok(report)
}

fn require_n1(model: &ModelManifold) -> Result<()> {
    if model.frame().n() != 1 {
        return Err(Error::InvalidParameter("this check is implemented for n = 1".into()));
    }
    Ok(())
}

fn eigen_block(c: &BlockComplex, tol: &Tolerances) -> Result<Vec<Check>> {
    let id = c.block().id;
    let mut out = Vec::new();
    let rel = tol.eigen_rel;
    let q0 = q_decomposition(c, 0)?;
    let lap0 = c.laplacian_rn(0)?.matrix;
    let lap1 = c.laplacian_rn(1)?.matrix;
    let del0 = c.del_n(0)?.matrix;
    let delbar0 = c.delbar_n(0)?.matrix;
    let del1 = c.del_n(1)?.matrix;
    let delbar1 = c.delbar_n(1)?.matrix;
    let d0 = c.d_rescaled(0)?.matrix;
    let dmid = c.d_rescaled(1)?.matrix;
    let dtd = dmid.adjoint() * &dmid;
    let lie1 = c.lie_t_rumin(1)?.matrix;
    let e1 = lap1.nrows();

    let total: usize = q0.iter().map(|q| q.basis.ncols()).sum();
    out.push(Check::count("eigen.q_complete", "Eᵏ = ⊕ Q(λ₁₀, λ₀₁)", total, lap0.nrows()).at(id, 0));

    let mut predicted_image: Vec<f64> = Vec::new();
    let mut image_cols = zeros(e1, 0);
    for q in &q0 {
        let (l10, l01) = (q.lambda10, q.lambda01);
        let v = &q.basis;
        let target = (l10 + l01).powi(2);
        let tag = format!("λ10 = {l10}, λ01 = {l01}");
        let r0 = eigen_residual(&lap0, v, target) / target.max(1.0);
        out.push(Check::new("eigen.law_degree0", "Δ_RN = (λ₁₀+λ₀₁)² on Q⁰(λ₁₀, λ₀₁)", r0, rel).at(id, 0).with_detail(tag.clone()));
        if l10 == 0.0 && l01 == 0.0 {
            let r = eigen_residual(&lap0, v, 0.0);
            out.push(Check::new("eigen.q_zero_is_kernel", "Q(0,0) = Ker Δ_RN", r, tol.residual).at(id, 0));
            continue;
        }
        // Image of Q⁰ in E¹ under ∂_N and ∂̄_N.
        let img = column_space(&hstack(&(&del0 * v), &(&delbar0 * v)));
        let r1 = eigen_residual(&lap1, &img, target) / target.max(1.0);
        out.push(Check::new("eigen.law_degree1", "Δ_RN = (λ₁₀+λ₀₁)² on ∂_N Q⁰ + ∂̄_N Q⁰", r1, rel).at(id, 1).with_detail(tag.clone()));
        predicted_image.extend(std::iter::repeat(target).take(img.ncols()));
        image_cols = hstack(&image_cols, &img);
        if l10 > 0.0 && l01 > 0.0 {
            out.extend(triple_checks(c, tol, q, &TripleOps { d0: &d0, del0: &del0, delbar0: &delbar0, dtd: &dtd, lap1: &lap1, lie1: &lie1 })?);
            out.extend(corner_checks(c, q, &del0, &delbar0, &del1, &delbar1)?);
        } else {
            // Single-sided corners: ∂̄_N on Q⁰(0, λ₀₁) or ∂_N on Q⁰(λ₁₀, 0) is injective.
            let map = if l10 == 0.0 { &delbar0 * v } else { &del0 * v };
            out.push(
                Check::count("eigen.corner_one_sided", "∂_N or ∂̄_N is an isomorphism on Q⁰(λ,0), Q⁰(0,λ)", rank(&map), v.ncols())
                    .at(id, 0)
                    .with_detail(tag),
            );
        }
    }
    // Every positive Δ_RN¹ eigenvalue on Im ∂_N + Im ∂̄_N is accounted for.
    let span = column_space(&hstack(&del0, &delbar0));
    out.push(Check::count("eigen.image_exhausted", "⊕ (∂_N Q⁰ + ∂̄_N Q⁰) = Im ∂_N + Im ∂̄_N", image_cols.ncols(), span.ncols()).at(id, 1));
    let restricted = restrict(&lap1, &span);
    let (vals, _) = hermitian_eigen(&((&restricted + restricted.adjoint()) * C64::new(0.5, 0.0)))?;
    predicted_image.sort_by(f64::total_cmp);
    let mismatch = multiset_distance(&vals, &predicted_image, rel);
    out.push(
        Check::new("eigen.law_multiset", "spec(Δ_RN on Im ∂_N + Im ∂̄_N) = {(λ₁₀+λ₀₁)²}", mismatch, rel).at(id, 1),
    );
    let min = vals.first().copied().unwrap_or(f64::INFINITY);
    let positive = if vals.is_empty() { 0.0 } else { f64::from(u8::from(min <= kernel_threshold(&vals))) };
    out.push(
        Check::new("eigen.positive_on_image", "Δ_RN > 0 on Im ∂_N + Im ∂̄_N", positive, 0.0)
            .at(id, 1)
            .with_detail(format!("min eigenvalue {min:e}")),
    );
    // Hodge-star symmetry of spectra: Δ_RN^k and Δ_RN^{3−k}.
    for k in 0..=1 {
        let (a, _) = hermitian_eigen(&c.laplacian_rn(k)?.matrix)?;
        let (b, _) = hermitian_eigen(&c.laplacian_rn(c.top_degree() - k)?.matrix)?;
        let r = multiset_distance(&a, &b, rel);
        out.push(Check::new("eigen.star_symmetry", "spec Δ_RN^k = spec Δ_RN^{2n+1−k}", r, rel).at(id, k));
    }
    Ok(out)
}

struct TripleOps<'a> {
    d0: &'a CMatrix,
    del0: &'a CMatrix,
    delbar0: &'a CMatrix,
    dtd: &'a CMatrix,
    lap1: &'a CMatrix,
    lie1: &'a CMatrix,
}

/// The explicit computation on `W = Q⁰(λ₁₀, λ₀₁) ∩ Im ∂_N* ∩ Im ∂̄_N*` through
/// normalized triples `ψ, ∂_Nψ, ∂̄_Nψ`.
fn triple_checks(c: &BlockComplex, tol: &Tolerances, q: &QSpace, ops: &TripleOps) -> Result<Vec<Check>> {
    let id = c.block().id;
    let (l10, l01) = (q.lambda10, q.lambda01);
    let rel = tol.eigen_rel;
    let sum = l10 + l01;
    let target = sum * sum;
    let mut worst_split: f64 = 0.0;
    let mut worst_u: f64 = 0.0;
    let mut worst_v: f64 = 0.0;
    let mut worst_formula: f64 = 0.0;
    let mut worst_lap: f64 = 0.0;
    let c64 = |x: f64| C64::new(x, 0.0);
    for psi in q.basis.column_iter() {
        let psi: DVector<C64> = psi.into_owned();
        let p10 = ops.del0 * &psi;
        let p01 = ops.delbar0 * &psi;
        let (n10, n01) = (p10.norm(), p01.norm());
        let (u10, u01) = (&p10 / c64(n10), &p01 / c64(n01));
        let dpsi = ops.d0 * &psi;
        let split = &dpsi - (&u10 * c64(l10.sqrt()) + &u01 * c64(l01.sqrt()));
        worst_split = worst_split.max(split.norm());
        let u = &u10 * c64(l10.sqrt()) + &u01 * c64(l01.sqrt());
        let ddstar = ops.d0 * ops.d0.adjoint();
        worst_u = worst_u.max((&ddstar * &u - &u * c64(sum)).norm() / sum);
        let v = &u10 * c64(l01.sqrt()) - &u01 * c64(l10.sqrt());
        // λ_T: eigenvalue of −√−1 L_T on ψ's images.
        let lt_vec = ops.lie1 * &u10 * C64::new(0.0, -1.0);
        let lambda_t = (u10.adjoint() * &lt_vec)[(0, 0)].re;
        let a = lambda_t - 2.0 * l10;
        let b = lambda_t + 2.0 * l01;
        let predicted = (a * a * l01 + b * b * l10) / sum;
        worst_v = worst_v.max((ops.dtd * &v - &v * c64(predicted)).norm() / predicted.max(1.0));
        worst_formula = worst_formula.max((predicted - (lambda_t * lambda_t + 4.0 * l10 * l01)).abs() / target.max(1.0));
        worst_lap = worst_lap.max((ops.lap1 * &u - &u * c64(target)).norm() / target.max(1.0));
        worst_lap = worst_lap.max((ops.lap1 * &v - &v * c64(target)).norm() / target.max(1.0));
    }
    let tag = format!("λ10 = {l10}, λ01 = {l01}");
    Ok(vec![
        Check::new("eigen.triple_split", "d_N ψ⁰⁰ = √λ₁₀ ψ¹⁰ + √λ₀₁ ψ⁰¹", worst_split, tol.residual.max(rel * target.sqrt()))
            .at(id, 0)
            .with_detail(tag.clone()),
        Check::new("eigen.triple_dd_star", "d_N d_N* u = (λ₁₀+λ₀₁) u", worst_u, rel).at(id, 1).with_detail(tag.clone()),
        Check::new("eigen.triple_dstar_d", "D*D v = (A²λ₀₁ + B²λ₁₀)/(λ₁₀+λ₀₁) v", worst_v, rel).at(id, 1).with_detail(tag.clone()),
        Check::new("eigen.triple_formula", "(A²λ₀₁ + B²λ₁₀)/(λ₁₀+λ₀₁) = λ_T² + 4λ₁₀λ₀₁ = (λ₁₀+λ₀₁)²", worst_formula, rel)
            .at(id, 1)
            .with_detail(tag.clone()),
        Check::new("eigen.triple_laplacian", "Δ_RN u = Δ_RN v = (λ₁₀+λ₀₁)²", worst_lap, rel).at(id, 1).with_detail(tag),
    ])
}

/// Corner maps from `W` to `Q¹ ∩ Im ∂_N* ∩ Im ∂̄_N` and `Q¹ ∩ Im ∂_N ∩ Im ∂̄_N*`
/// are bijective.
fn corner_checks(
    c: &BlockComplex,
    q: &QSpace,
    del0: &CMatrix,
    delbar0: &CMatrix,
    del1: &CMatrix,
    delbar1: &CMatrix,
) -> Result<Vec<Check>> {
    let id = c.block().id;
    let tag = format!("λ10 = {}, λ01 = {}", q.lambda10, q.lambda01);
    // W = Q⁰ ∩ Im ∂_N* ∩ Im ∂̄_N* (Im ∂* = (Ker ∂)^⊥ in degree 0).
    let im_del_star0 = column_space(&del0.adjoint());
    let im_delbar_star0 = column_space(&delbar0.adjoint());
    let w = intersection(&intersection(&q.basis, &im_del_star0), &im_delbar_star0);
    let q1 = column_space(&hstack(&(del0 * &q.basis), &(delbar0 * &q.basis)));
    let im_del_star1 = column_space(&del1.adjoint());
    let im_delbar_star1 = column_space(&delbar1.adjoint());
    let corner_a = intersection(&intersection(&q1, &im_del_star1), &column_space(delbar0));
    let corner_b = intersection(&intersection(&q1, &column_space(del0)), &im_delbar_star1);
    let mut out = Vec::new();
    for (name, map, corner) in [("eigen.corner_delbar", delbar0, &corner_a), ("eigen.corner_del", del0, &corner_b)] {
        let image = map * &w;
        let inside = if corner.ncols() == 0 { image.clone() } else { &image - corner * (corner.adjoint() * &image) };
        let leak = max_abs(&inside) / max_abs(&image).max(1.0);
        let r = rank(&image);
        let defect = (r.abs_diff(w.ncols()) + r.abs_diff(corner.ncols())) as f64 + if leak > 1e-8 { 1.0 } else { 0.0 };
        out.push(
            Check::new(name, "∂_N, ∂̄_N: Q⁰ ∩ Im ∂_N* ∩ Im ∂̄_N* → Q¹ corners are isomorphisms", defect, 0.0)
                .at(id, 0)
                .with_detail(format!("{tag}; dim W = {}, rank = {r}, corner dim = {}, leak = {leak:e}", w.ncols(), corner.ncols())),
        );
    }
    Ok(out)
}

/// Worst relative difference between two sorted multisets; infinite if the
/// sizes differ.
pub fn multiset_distance(a: &[f64], b: &[f64], _rel: f64) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0)).fold(0.0, f64::max)
}

// ---- middle degree -------------------------------------------------------

/// `Δ_RN = D*D = −L_T²` on `Ker ∂_N* ∩ Ker ∂̄_N* ∩ Eⁿ`, `ν²` on `Qⁿ(ν)`, and
/// `Δ_RN = −L_T²` on the one-sided kernel/image pieces. Requires `n = 1`.
pub fn verify_middle_degree(model: &ModelManifold, max_weight: usize, tol: &Tolerances) -> Result<VerificationReport> {
    require_n1(model)?;
    let checks = per_block(model, max_weight, |c| middle_block(c, tol))?;
    let mut report = VerificationReport::new("middle", model, max_weight, *tol);
    report.extend(collect_checks(checks));
    Ok(report)
}

fn middle_block(c: &BlockComplex, tol: &Tolerances) -> Result<Vec<Check>> {
    let id = c.block().id;
    let t = tol.residual;
    let mut out = Vec::new();
    let del0 = c.del_n(0)?.matrix;
    let delbar0 = c.delbar_n(0)?.matrix;
    let lap1 = c.laplacian_rn(1)?.matrix;
    let dmid = c.d_rescaled(1)?.matrix;
    let dtd = dmid.adjoint() * &dmid;
    let lie1 = c.lie_t_rumin(1)?.matrix;
    let minus_lt2 = -(&lie1 * &lie1);
    let scale = max_abs(&lap1).max(1.0);

    // Ker ∂_N* ∩ Ker ∂̄_N* ∩ E¹.
    let kk = null_space(&vstack(&del0.adjoint(), &delbar0.adjoint()));
    let r_lap = apply_norm(&(&lap1 - &dtd), &kk) / scale;
    let r_lt = apply_norm(&(&dtd - &minus_lt2), &kk) / scale;
    out.push(Check::new("middle.ker_ker_laplacian", "Δ_RN = D*D on Ker ∂_N* ∩ Ker ∂̄_N* ∩ Eⁿ", r_lap, t).at(id, 1));
    out.push(Check::new("middle.ker_ker_reeb", "D*D = −L_T² on Ker ∂_N* ∩ Ker ∂̄_N* ∩ Eⁿ", r_lt, t).at(id, 1));
    if kk.ncols() > 0 {
        let nu_op = restrict(&lie1, &kk) * C64::new(0.0, -1.0);
        let nu_op = (&nu_op + nu_op.adjoint()) * C64::new(0.5, 0.0);
        for s in crate::linalg::joint_decomposition(&[&nu_op])? {
            let nu = s.tags[0];
            let v = &kk * &s.basis;
            let r = eigen_residual(&lap1, &v, nu * nu) / (nu * nu).max(1.0);
            out.push(
                Check::new("middle.q_nu", "Δ_RN = ν² on Qⁿ(ν)", r, tol.eigen_rel)
                    .at(id, 1)
                    .with_detail(format!("ν = {}", round_sig(nu, TAG_DIGITS))),
            );
        }
    }
    // One-sided pieces: E⁰ ∩ Ker Δ_∂N ∩ Im Δ_∂̄N (and conjugate), and
    // E¹ ∩ Im ∂̄_N ∩ Ker Δ_∂N (and conjugate).
    let lap0 = c.laplacian_rn(0)?.matrix;
    let lie0 = c.lie_t_rumin(0)?.matrix;
    let minus_lt2_0 = -(&lie0 * &lie0);
    let ld0 = c.laplacian_del_n(0)?.matrix;
    let lb0 = c.laplacian_delbar_n(0)?.matrix;
    let ld1 = c.laplacian_del_n(1)?.matrix;
    let lb1 = c.laplacian_delbar_n(1)?.matrix;
    let scale0 = max_abs(&lap0).max(1.0);
    let pieces0 = [
        ("middle.ker_im_degree0", "Δ_RN = −L_T² on E⁰ ∩ Ker Δ_∂N ∩ Im Δ_∂̄N", intersection(&null_space(&ld0), &column_space(&lb0))),
        ("middle.im_ker_degree0", "Δ_RN = −L_T² on E⁰ ∩ Im Δ_∂N ∩ Ker Δ_∂̄N", intersection(&column_space(&ld0), &null_space(&lb0))),
    ];
    for (name, identity, v) in pieces0 {
        let r = apply_norm(&(&lap0 - &minus_lt2_0), &v) / scale0;
        out.push(Check::new(name, identity, r, t).at(id, 0).with_detail(format!("dim {}", v.ncols())));
    }
    let pieces1 = [
        ("middle.im_delbar_ker", "Δ_RN = −L_T² on Eⁿ ∩ Im ∂̄_N ∩ Ker Δ_∂N", intersection(&column_space(&delbar0), &null_space(&ld1))),
        ("middle.im_del_ker", "Δ_RN = −L_T² on Eⁿ ∩ Im ∂_N ∩ Ker Δ_∂̄N", intersection(&column_space(&del0), &null_space(&lb1))),
    ];
    for (name, identity, v) in pieces1 {
        let r = apply_norm(&(&lap1 - &minus_lt2), &v) / scale;
        out.push(Check::new(name, identity, r, t).at(id, 1).with_detail(format!("dim {}", v.ncols())));
    }
    Ok(out)
}
