//! Differential operators of the de Rham and Rumin complexes on one function
//! block, as dense matrices in orthonormal coordinates.
//!
//! A form of degree `k` over a block is a vector indexed by
//! `coframe_index * block.dim + function_index`, where the coframe part uses
//! orthonormalized monomials. Every operator is a sum of Kronecker products of
//! a coframe matrix with a function-space matrix, so adjoints are conjugate
//! transposes.

use std::sync::OnceLock;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{
    horizontal_monomials, interior_t, j_action, matrix_of, monomials, theta_wedge, wedge, CoframeIndex,
    ContactAlgebra, PointwiseForm, C64, I, ONE,
};
use crate::linalg::{hermitian_sqrt, max_abs, mul, CMatrix};
use crate::model::{BlockId, FrameStructure, FunctionBlock};

/// Residual allowed when checking that an assembled operator lands in its target.
const LEAK_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "flavor", rename_all = "lowercase")]
pub enum Flavor {
    /// All of `Ωᵏ`.
    Full,
    /// `Ω_Hᵏ`, forms without a `θ` factor.
    Horizontal,
    /// Rumin's `Eᵏ`: primitive horizontal forms for `k ≤ n`, `θ ∧ ker L` above.
    Rumin,
    /// Monomials of one bidegree, with or without `θ`.
    Bidegree { i: usize, j: usize, vertical: bool },
}

/// A space of `k`-forms over one block, given by an orthonormal coframe frame.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedSpace {
    pub degree: usize,
    pub flavor: Flavor,
    pub block: BlockId,
    pub func_dim: usize,
    /// Coframe monomials of degree `k`; coordinates of `coframe_basis` refer to these.
    pub monomials: Vec<CoframeIndex>,
    /// Orthonormal columns spanning the flavor's fiber.
    pub coframe_basis: CMatrix,
}

impl GradedSpace {
    pub fn dim(&self) -> usize {
        self.func_dim * self.coframe_basis.ncols()
    }

    pub fn fiber_dim(&self) -> usize {
        self.coframe_basis.ncols()
    }

    /// Isometric embedding into the full space of the same degree.
    pub fn embedding(&self) -> CMatrix {
        self.coframe_basis.kronecker(&CMatrix::identity(self.func_dim, self.func_dim))
    }

    /// Basis of the fiber as pointwise forms.
    pub fn fiber_forms(&self, n: usize) -> Vec<PointwiseForm> {
        self.coframe_basis
            .column_iter()
            .map(|c| PointwiseForm::from_vector(n, &self.monomials, &c.into_owned(), true))
            .collect()
    }
}

/// A linear map between graded spaces over one block.
#[derive(Clone, Debug)]
pub struct BlockOperator {
    pub source: GradedSpace,
    pub target: GradedSpace,
    pub matrix: CMatrix,
}

impl BlockOperator {
    pub fn new(source: GradedSpace, target: GradedSpace, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != target.dim() {
            return Err(Error::DimensionMismatch { left: matrix.nrows(), right: target.dim() });
        }
        if matrix.ncols() != source.dim() {
            return Err(Error::DimensionMismatch { left: matrix.ncols(), right: source.dim() });
        }
        Ok(BlockOperator { source, target, matrix })
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &BlockOperator) -> Result<BlockOperator> {
        if inner.target != self.source {
            return Err(Error::DimensionMismatch { left: inner.target.dim(), right: self.source.dim() });
        }
        Ok(BlockOperator {
            source: inner.source.clone(),
            target: self.target.clone(),
            matrix: mul(&self.matrix, &inner.matrix),
        })
    }

    /// `L²` adjoint, the conjugate transpose in orthonormal coordinates.
    pub fn adjoint(&self) -> BlockOperator {
        BlockOperator { source: self.target.clone(), target: self.source.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn add(&self, other: &BlockOperator) -> Result<BlockOperator> {
        self.same_shape(other)?;
        Ok(BlockOperator { matrix: &self.matrix + &other.matrix, ..self.clone() })
    }

    pub fn sub(&self, other: &BlockOperator) -> Result<BlockOperator> {
        self.same_shape(other)?;
        Ok(BlockOperator { matrix: &self.matrix - &other.matrix, ..self.clone() })
    }

    pub fn scale(&self, c: C64) -> BlockOperator {
        BlockOperator { matrix: &self.matrix * c, ..self.clone() }
    }

    fn same_shape(&self, other: &BlockOperator) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::DimensionMismatch { left: self.matrix.nrows(), right: other.matrix.nrows() });
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    pub fn is_square(&self) -> bool {
        self.source == self.target
    }

    /// Row-major `[re, im]` pairs plus shape and space labels.
    pub fn to_json(&self) -> serde_json::Value {
        let data: Vec<[f64; 2]> = (0..self.matrix.nrows())
            .flat_map(|r| (0..self.matrix.ncols()).map(move |c| (r, c)))
            .map(|(r, c)| [self.matrix[(r, c)].re, self.matrix[(r, c)].im])
            .collect();
        serde_json::json!({
            "schema": 1,
            "block": self.source.block,
            "source": { "degree": self.source.degree, "space": self.source.flavor },
            "target": { "degree": self.target.degree, "space": self.target.flavor },
            "rows": self.matrix.nrows(),
            "cols": self.matrix.ncols(),
            "data": data,
        })
    }
}

/// Rescaling constants of the Rumin complex: `a_k = 1/√|n-k|`, `a_n = 1`.
pub fn rescaling(n: usize, k: usize) -> f64 {
    if k == n {
        1.0
    } else {
        1.0 / ((n as f64 - k as f64).abs()).sqrt()
    }
}

/// Orthonormalizes columns in order, dropping those dependent on earlier ones.
fn gram_schmidt(columns: &[DVector<C64>]) -> Vec<DVector<C64>> {
    let mut out: Vec<DVector<C64>> = Vec::new();
    for v in columns {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let proj = q.dotc(&w);
                w -= q * proj;
            }
        }
        let norm = w.norm();
        if norm > 1e-10 {
            out.push(w / C64::new(norm, 0.0));
        }
    }
    out
}

fn columns_to_matrix(rows: usize, cols: &[DVector<C64>]) -> CMatrix {
    if cols.is_empty() {
        CMatrix::zeros(rows, 0)
    } else {
        CMatrix::from_columns(cols)
    }
}

/// All operators of one block of a homogeneous contact metric manifold.
pub struct BlockComplex {
    n: usize,
    frame: FrameStructure,
    algebra: ContactAlgebra,
    block: FunctionBlock,
    /// Actions of the complex frame `T, Zⱼ, Z̄ⱼ`.
    actions: Vec<CMatrix>,
    coframe_d: Vec<PointwiseForm>,
    sasakian: bool,
    d_cache: Vec<OnceLock<CMatrix>>,
    db_cache: Vec<OnceLock<CMatrix>>,
    lie_cache: Vec<OnceLock<CMatrix>>,
    /// `(∂_b, ∂̄_b, residual of d_b outside their sum)` per degree.
    split_cache: Vec<OnceLock<(CMatrix, CMatrix, f64)>>,
    rumin_cache: Vec<OnceLock<GradedSpace>>,
}

impl BlockComplex {
    pub fn new(frame: &FrameStructure, block: FunctionBlock) -> Result<Self> {
        if block.field_actions.len() != frame.dim() {
            return Err(Error::DimensionMismatch { left: block.field_actions.len(), right: frame.dim() });
        }
        let residual = block.bracket_residual(frame);
        if residual > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "block actions do not represent the frame brackets (residual {residual:e})"
            )));
        }
        let n = frame.n();
        let top = 2 * n + 2;
        Ok(BlockComplex {
            n,
            algebra: frame.contact_algebra()?,
            actions: block.complex_actions(frame),
            coframe_d: frame.coframe_differentials(),
            sasakian: frame.is_sasakian(),
            frame: frame.clone(),
            block,
            d_cache: (0..top).map(|_| OnceLock::new()).collect(),
            db_cache: (0..top).map(|_| OnceLock::new()).collect(),
            lie_cache: (0..top).map(|_| OnceLock::new()).collect(),
            split_cache: (0..top).map(|_| OnceLock::new()).collect(),
            rumin_cache: (0..top).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn top_degree(&self) -> usize {
        2 * self.n + 1
    }

    pub fn block(&self) -> &FunctionBlock {
        &self.block
    }

    pub fn frame(&self) -> &FrameStructure {
        &self.frame
    }

    pub fn algebra(&self) -> &ContactAlgebra {
        &self.algebra
    }

    fn fdim(&self) -> usize {
        self.block.dim
    }

    fn id_f(&self) -> CMatrix {
        CMatrix::identity(self.fdim(), self.fdim())
    }

    fn check_degree(&self, k: usize) -> Result<()> {
        if k > self.top_degree() {
            return Err(Error::InvalidParameter(format!("degree {k} exceeds {}", self.top_degree())));
        }
        Ok(())
    }

    // ---- spaces -------------------------------------------------------

    fn make_space(&self, degree: usize, flavor: Flavor, basis: CMatrix) -> GradedSpace {
        GradedSpace {
            degree,
            flavor,
            block: self.block.id,
            func_dim: self.fdim(),
            monomials: monomials(self.n, degree),
            coframe_basis: basis,
        }
    }

    /// Space of degree `k` forms of a flavor; degrees above `2n+1` give the zero space.
    pub fn space(&self, k: usize, flavor: Flavor) -> Result<GradedSpace> {
        let mons = monomials(self.n, k);
        let select = |keep: &dyn Fn(&CoframeIndex) -> bool| {
            let cols: Vec<DVector<C64>> = mons
                .iter()
                .enumerate()
                .filter(|(_, m)| keep(m))
                .map(|(i, _)| {
                    let mut v = DVector::zeros(mons.len());
                    v[i] = ONE;
                    v
                })
                .collect();
            columns_to_matrix(mons.len(), &cols)
        };
        let basis = match flavor {
            Flavor::Full => CMatrix::identity(mons.len(), mons.len()),
            Flavor::Horizontal => select(&|m| !m.has_theta()),
            Flavor::Bidegree { i, j, vertical } => select(&|m| m.bidegree() == crate::exterior::Bidegree { i, j, vertical }),
            Flavor::Rumin => {
                if k <= self.top_degree() {
                    return Ok(self.rumin(k));
                }
                CMatrix::zeros(0, 0)
            }
        };
        Ok(self.make_space(k, flavor, basis))
    }

    pub fn full(&self, k: usize) -> GradedSpace {
        self.space(k, Flavor::Full).expect("degree in range")
    }

    pub fn horizontal(&self, k: usize) -> GradedSpace {
        self.space(k, Flavor::Horizontal).expect("degree in range")
    }

    /// `Eᵏ`, orthonormalized by Gram–Schmidt on projected monomials.
    pub fn rumin(&self, k: usize) -> GradedSpace {
        self.rumin_cache[k]
            .get_or_init(|| {
                let n = self.n;
                let mons = monomials(n, k);
                let pos = |m: &CoframeIndex| mons.iter().position(|x| x == m).expect("monomial present");
                let cols: Vec<DVector<C64>> = if k <= n {
                    let hm = horizontal_monomials(n, k);
                    let p = self.algebra.primitive_projector(k);
                    (0..hm.len())
                        .map(|c| {
                            let mut v = DVector::zeros(mons.len());
                            for (r, m) in hm.iter().enumerate() {
                                v[pos(m)] = p[(r, c)];
                            }
                            v
                        })
                        .collect()
                } else {
                    let hm = horizontal_monomials(n, k - 1);
                    let p = self.algebra.kernel_l_projector(k - 1);
                    (0..hm.len())
                        .map(|c| {
                            let mut v = DVector::zeros(mons.len());
                            for (r, m) in hm.iter().enumerate() {
                                v[pos(&m.with_theta())] = p[(r, c)];
                            }
                            v
                        })
                        .collect()
                };
                let basis = gram_schmidt(&cols);
                self.make_space(k, Flavor::Rumin, columns_to_matrix(mons.len(), &basis))
            })
            .clone()
    }

    // ---- coframe-level matrices --------------------------------------

    fn coframe_matrix(&self, from: usize, to: usize, f: impl Fn(&PointwiseForm) -> PointwiseForm) -> CMatrix {
        matrix_of(self.n, &monomials(self.n, from), &monomials(self.n, to), true, f)
            .expect("coframe map lands in the requested degree")
    }

    fn wedge_position(&self, k: usize, position: usize) -> CMatrix {
        let (idx, _) = CoframeIndex::from_positions(&[position], self.n).expect("single factor");
        let factor = PointwiseForm::monomial(self.n, idx, ONE);
        self.coframe_matrix(k, k + 1, |a| wedge(&factor, a).expect("same n"))
    }

    /// Exterior derivative of left-invariant forms, by the Leibniz rule on monomials.
    fn coframe_exterior(&self, a: &PointwiseForm) -> PointwiseForm {
        let n = self.n;
        let mut out = PointwiseForm::zero(n);
        for (m, c) in a.terms() {
            let pos = m.positions(n);
            for (i, p) in pos.iter().enumerate() {
                let mut term = PointwiseForm::one(n);
                for (j, q) in pos.iter().enumerate() {
                    let factor = if i == j {
                        self.coframe_d[*p].clone()
                    } else {
                        let (idx, _) = CoframeIndex::from_positions(&[*q], n).expect("single factor");
                        PointwiseForm::monomial(n, idx, ONE)
                    };
                    term = wedge(&term, &factor).expect("same n");
                }
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                out = out + term * (c * sign);
            }
        }
        out
    }

    fn kron_coframe(&self, c: &CMatrix) -> CMatrix {
        c.kronecker(&self.id_f())
    }

    // ---- full-space operators ----------------------------------------

    fn d_full(&self, k: usize) -> &CMatrix {
        self.d_cache[k].get_or_init(|| {
            let mut m = self.kron_coframe(&self.coframe_matrix(k, k + 1, |a| self.coframe_exterior(a)));
            for (pos, act) in self.actions.iter().enumerate() {
                m += self.wedge_position(k, pos).kronecker(act);
            }
            m
        })
    }

    fn lie_t_full(&self, k: usize) -> &CMatrix {
        self.lie_cache[k].get_or_init(|| {
            let coframe = self.coframe_matrix(k, k, |a| {
                let with_d = interior_t(&self.coframe_exterior(a));
                let with_i = self.coframe_exterior(&interior_t(a));
                with_d + with_i
            });
            self.kron_coframe(&coframe) + CMatrix::identity(monomials(self.n, k).len(), monomials(self.n, k).len()).kronecker(&self.actions[0])
        })
    }

    fn theta_full(&self, k: usize) -> CMatrix {
        self.kron_coframe(&self.coframe_matrix(k, k + 1, theta_wedge))
    }

    fn interior_full(&self, k: usize) -> CMatrix {
        self.kron_coframe(&self.coframe_matrix(k, k - 1, interior_t))
    }

    fn horizontal_projector_full(&self, k: usize) -> CMatrix {
        let h = self.horizontal(k).embedding();
        mul(&h, &h.adjoint())
    }

    fn bidegree_projector_full(&self, k: usize, i: usize, j: usize, vertical: bool) -> CMatrix {
        let e = self.space(k, Flavor::Bidegree { i, j, vertical }).expect("degree in range").embedding();
        mul(&e, &e.adjoint())
    }

    fn db_full(&self, k: usize) -> &CMatrix {
        self.db_cache[k].get_or_init(|| {
            let horizontal = mul(&mul(&self.horizontal_projector_full(k + 1), self.d_full(k)), &self.horizontal_projector_full(k));
            if k == 0 {
                return horizontal;
            }
            let inner = mul(&mul(&self.horizontal_projector_full(k), self.d_full(k - 1)), &self.horizontal_projector_full(k - 1));
            horizontal - mul(&mul(&self.theta_full(k), &inner), &self.interior_full(k))
        })
    }

    fn op(&self, source: GradedSpace, target: GradedSpace, matrix: CMatrix) -> BlockOperator {
        BlockOperator::new(source, target, matrix).expect("assembled with matching dimensions")
    }

    fn full_op(&self, from: usize, to: usize, matrix: CMatrix) -> BlockOperator {
        self.op(self.full(from), self.full(to), matrix)
    }

    /// Exterior derivative `d: Ωᵏ → Ωᵏ⁺¹`.
    pub fn d(&self, k: usize) -> Result<BlockOperator> {
        self.check_degree(k)?;
        Ok(self.full_op(k, k + 1, self.d_full(k).clone()))
    }

    /// `d_b`: horizontal part of `d` on `Ω_H`, extended by `d_b(θ∧α) = -θ∧d_b α`.
    pub fn db(&self, k: usize) -> Result<BlockOperator> {
        self.check_degree(k)?;
        Ok(self.full_op(k, k + 1, self.db_full(k).clone()))
    }

    /// `d_0 = L ∘ ι_T`.
    pub fn d0(&self, k: usize) -> Result<BlockOperator> {
        self.check_degree(k)?;
        let m = if k == 0 {
            CMatrix::zeros(self.full(1).dim(), self.full(0).dim())
        } else {
            let l = self.coframe_matrix(k - 1, k + 1, |a| self.algebra.lefschetz_l(a));
            mul(&self.kron_coframe(&l), &self.interior_full(k))
        };
        Ok(self.full_op(k, k + 1, m))
    }

    /// `d_T = θ ∧ L_T`.
    pub fn d_reeb(&self, k: usize) -> Result<BlockOperator> {
        self.check_degree(k)?;
        Ok(self.full_op(k, k + 1, mul(&self.theta_full(k), self.lie_t_full(k))))
    }

    /// `d_t = d_0 + t d_b + t² d_T`.
    pub fn forman_d(&self, k: usize, t: f64) -> Result<BlockOperator> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("t must be a finite nonnegative number, got {t}")));
        }
        let m = self.d0(k)?.matrix + self.db(k)?.matrix * C64::new(t, 0.0) + self.d_reeb(k)?.matrix * C64::new(t * t, 0.0);
        Ok(self.full_op(k, k + 1, m))
    }

    /// Lie derivative along the Reeb field on `Ωᵏ`.
    pub fn lie_t(&self, k: usize) -> Result<BlockOperator> {
        self.check_degree(k)?;
        Ok(self.full_op(k, k, self.lie_t_full(k).clone()))
    }

    pub fn theta_wedge(&self, k: usize) -> Result<BlockOperator> {
        self.check_degree(k)?;
        Ok(self.full_op(k, k + 1, self.theta_full(k)))
    }

    pub fn interior_t(&self, k: usize) -> Result<BlockOperator> {
        self.check_degree(k)?;
        if k == 0 {
            return Err(Error::InvalidParameter("ι_T is not defined on functions".into()));
        }
        Ok(self.full_op(k, k - 1, self.interior_full(k)))
    }

    /// `L = dθ ∧`.
    pub fn lefschetz(&self, k: usize) -> Result<BlockOperator> {
        self.check_degree(k)?;
        let l = self.coframe_matrix(k, k + 2, |a| self.algebra.lefschetz_l(a));
        Ok(self.full_op(k, k + 2, self.kron_coframe(&l)))
    }

    /// `Λ`, assembled from the pointwise algebra (not as an adjoint).
    pub fn lefschetz_adjoint(&self, k: usize) -> Result<BlockOperator> {
        self.check_degree(k)?;
        if k < 2 {
            return Err(Error::InvalidParameter("Λ needs degree at least 2".into()));
        }
        let lam = self.coframe_matrix(k, k - 2, |a| self.algebra.lefschetz_lambda(a));
        Ok(self.full_op(k, k - 2, self.kron_coframe(&lam)))
    }

    pub fn j_action(&self, k: usize) -> Result<BlockOperator> {
        self.check_degree(k)?;
        Ok(self.full_op(k, k, self.kron_coframe(&self.coframe_matrix(k, k, j_action))))
    }

    /// Hodge star `Ωᵏ → Ω²ⁿ⁺¹⁻ᵏ`.
    pub fn star(&self, k: usize) -> Result<BlockOperator> {
        self.check_degree(k)?;
        let top = self.top_degree();
        let s = self.coframe_matrix(k, top - k, |a| self.algebra.hodge_star(a));
        Ok(self.full_op(k, top - k, self.kron_coframe(&s)))
    }

    fn require_sasakian(&self) -> Result<()> {
        if self.sasakian {
            Ok(())
        } else {
            Err(Error::NotSasakian(
                self.frame.check_sasakian().err().map(|e| e.to_string()).unwrap_or_default(),
            ))
        }
    }

    fn bidegree_shift(&self, k: usize, di: usize, dj: usize) -> CMatrix {
        let db = self.db_full(k);
        let mut out = CMatrix::zeros(db.nrows(), db.ncols());
        for vertical in [false, true] {
            if vertical && k == 0 {
                continue;
            }
            let hk = k - vertical as usize;
            for i in 0..=hk {
                let j = hk - i;
                if i + di + j + dj > 2 * self.n || i + di > self.n || j + dj > self.n || i > self.n || j > self.n {
                    continue;
                }
                let src = self.bidegree_projector_full(k, i, j, vertical);
                let tgt = self.bidegree_projector_full(k + 1, i + di, j + dj, vertical);
                out += mul(&mul(&tgt, db), &src);
            }
        }
        out
    }

    fn db_split(&self, k: usize) -> &(CMatrix, CMatrix, f64) {
        self.split_cache[k].get_or_init(|| {
            let del = self.bidegree_shift(k, 1, 0);
            let delbar = self.bidegree_shift(k, 0, 1);
            let rest = max_abs(&(self.db_full(k) - &del - &delbar));
            (del, delbar, rest)
        })
    }

    fn checked_split(&self, k: usize) -> Result<&(CMatrix, CMatrix, f64)> {
        self.check_degree(k)?;
        self.require_sasakian()?;
        let split = self.db_split(k);
        if split.2 > LEAK_TOL * max_abs(self.db_full(k)).max(1.0) {
            return Err(Error::NotSasakian(format!("d_b has components outside (1,0)+(0,1) (residual {:e})", split.2)));
        }
        Ok(split)
    }

    /// `∂_b`, the `(1,0)` part of `d_b`.
    pub fn del_b(&self, k: usize) -> Result<BlockOperator> {
        let m = self.checked_split(k)?.0.clone();
        Ok(self.full_op(k, k + 1, m))
    }

    /// `∂̄_b`, the `(0,1)` part of `d_b`.
    pub fn delbar_b(&self, k: usize) -> Result<BlockOperator> {
        let m = self.checked_split(k)?.1.clone();
        Ok(self.full_op(k, k + 1, m))
    }

    // ---- restriction -------------------------------------------------

    /// Restricts a full-space operator to flavored spaces, `E_tgt† A E_src`,
    /// verifying that the image lies in the target space.
    pub fn restrict(&self, op: &BlockOperator, source: &GradedSpace, target: &GradedSpace) -> Result<BlockOperator> {
        if op.source.flavor != Flavor::Full || op.target.flavor != Flavor::Full {
            return Err(Error::InvalidParameter("restriction expects a full-space operator".into()));
        }
        if source.degree != op.source.degree || target.degree != op.target.degree {
            return Err(Error::DimensionMismatch { left: source.degree, right: op.source.degree });
        }
        let es = source.embedding();
        let et = target.embedding();
        let image = mul(&op.matrix, &es);
        let m = mul(&et.adjoint(), &image);
        let leak = max_abs(&(&image - mul(&et, &m)));
        if leak > LEAK_TOL * op.max_abs().max(1.0) {
            return Err(Error::Internal(format!(
                "operator leaves the {:?} space of degree {} (residual {leak:e})",
                target.flavor, target.degree
            )));
        }
        Ok(self.op(source.clone(), target.clone(), m))
    }

    /// Compresses a full-space operator, `E_tgt† A E_src`, without the
    /// image check (used where the target is a quotient, e.g. `P ∘ d`).
    pub fn compress(&self, op: &BlockOperator, source: &GradedSpace, target: &GradedSpace) -> BlockOperator {
        let m = mul(&mul(&target.embedding().adjoint(), &op.matrix), &source.embedding());
        self.op(source.clone(), target.clone(), m)
    }

    // ---- Rumin complex -----------------------------------------------

    /// `D` on `Eⁿ` from the lift construction `θ ∧ (L_T + d_b L⁻¹ d_b)`.
    pub fn rumin_d_middle(&self) -> Result<BlockOperator> {
        let n = self.n;
        let hn = self.horizontal(n);
        let hup = self.horizontal(n + 1);
        let hdown = self.horizontal(n - 1);
        let db_up = self.compress(&self.db(n)?, &hn, &hup).matrix;
        let db_down = self.compress(&self.db(n - 1)?, &hdown, &hn).matrix;
        let lie = self.compress(&self.lie_t(n)?, &hn, &hn).matrix;
        let l = self.algebra.l_matrix(&horizontal_monomials(n, n - 1), &horizontal_monomials(n, n + 1));
        let l_inv = l
            .try_inverse()
            .ok_or_else(|| Error::Internal("L: ⋀ⁿ⁻¹H* → ⋀ⁿ⁺¹H* is singular".into()))?;
        let inner = lie + db_down * self.kron_coframe(&l_inv) * db_up;
        let lifted = mul(&mul(&mul(&self.theta_full(n), &hn.embedding()), &inner), &hn.embedding().adjoint());
        let full = self.full_op(n, n + 1, lifted);
        self.restrict(&full, &self.rumin(n), &self.rumin(n + 1))
    }

    /// `D` on `Eⁿ` from the Kähler-type formula `θ ∧ (L_T - i(∂_b+∂̄_b)(∂_b* - ∂̄_b*))`.
    pub fn rumin_d_middle_kahler(&self) -> Result<BlockOperator> {
        let n = self.n;
        let hn = self.horizontal(n);
        let hdown = self.horizontal(n - 1);
        let del = self.compress(&self.del_b(n - 1)?, &hdown, &hn).matrix;
        let delbar = self.compress(&self.delbar_b(n - 1)?, &hdown, &hn).matrix;
        let lie = self.compress(&self.lie_t(n)?, &hn, &hn).matrix;
        let inner = lie - (&del + &delbar) * (del.adjoint() - delbar.adjoint()) * I;
        let lifted = mul(&mul(&mul(&self.theta_full(n), &hn.embedding()), &inner), &hn.embedding().adjoint());
        let full = self.full_op(n, n + 1, lifted);
        self.restrict(&full, &self.rumin(n), &self.rumin(n + 1))
    }

    /// Rumin differential `d_R: Eᵏ → Eᵏ⁺¹`.
    pub fn d_rumin(&self, k: usize) -> Result<BlockOperator> {
        self.check_degree(k)?;
        let n = self.n;
        let src = self.rumin(k);
        let tgt = self.space(k + 1, Flavor::Rumin)?;
        if k < n {
            Ok(self.compress(&self.d(k)?, &src, &tgt))
        } else if k == n {
            self.rumin_d_middle()
        } else {
            self.restrict(&self.d(k)?, &src, &tgt)
        }
    }

    /// Rescaled differential `d_N = a_k d_R`.
    pub fn d_rescaled(&self, k: usize) -> Result<BlockOperator> {
        Ok(self.d_rumin(k)?.scale(C64::new(rescaling(self.n, k), 0.0)))
    }

    fn rumin_holomorphic_part(&self, k: usize, holomorphic: bool) -> Result<BlockOperator> {
        if k > self.n {
            return Err(Error::InvalidParameter(format!("∂_N is defined on Eᵏ for k ≤ n, got {k}")));
        }
        let part = if holomorphic { self.del_b(k)? } else { self.delbar_b(k)? };
        let target = if k < self.n { self.rumin(k + 1) } else { self.horizontal(k + 1) };
        Ok(self.compress(&part, &self.rumin(k), &target).scale(C64::new(rescaling(self.n, k), 0.0)))
    }

    /// `∂_N = a_k P ∂_b` on `Eᵏ`; for `k = n` the target is `Ω_Hⁿ⁺¹`.
    pub fn del_n(&self, k: usize) -> Result<BlockOperator> {
        self.rumin_holomorphic_part(k, true)
    }

    /// `∂̄_N = a_k P ∂̄_b` on `Eᵏ`; for `k = n` the target is `Ω_Hⁿ⁺¹`.
    pub fn delbar_n(&self, k: usize) -> Result<BlockOperator> {
        self.rumin_holomorphic_part(k, false)
    }

    fn half_laplacian(&self, k: usize, holomorphic: bool) -> Result<BlockOperator> {
        let part = |j| if holomorphic { self.del_n(j) } else { self.delbar_n(j) };
        let up = part(k)?;
        let mut m = mul(&up.adjoint().matrix, &up.matrix);
        if k > 0 {
            let down = part(k - 1)?;
            m += mul(&down.matrix, &down.adjoint().matrix);
        }
        Ok(self.op(self.rumin(k), self.rumin(k), m))
    }

    /// `Δ_{∂_N} = ∂_N ∂_N* + ∂_N* ∂_N` on `Eᵏ`, `k ≤ n`.
    pub fn laplacian_del_n(&self, k: usize) -> Result<BlockOperator> {
        self.half_laplacian(k, true)
    }

    /// `Δ_{∂̄_N}` on `Eᵏ`, `k ≤ n`.
    pub fn laplacian_delbar_n(&self, k: usize) -> Result<BlockOperator> {
        self.half_laplacian(k, false)
    }

    /// `L_T` restricted to `Eᵏ`.
    pub fn lie_t_rumin(&self, k: usize) -> Result<BlockOperator> {
        let e = self.rumin(k);
        self.restrict(&self.lie_t(k)?, &e, &e)
    }

    // ---- Laplacians --------------------------------------------------

    fn checked_hermitian(&self, op: BlockOperator) -> Result<BlockOperator> {
        let residual = crate::linalg::hermitian_residual(&op.matrix);
        if residual > 1e-10 * op.max_abs().max(1.0) {
            return Err(Error::Internal(format!(
                "assembled Laplacian in degree {} is not Hermitian (residual {residual:e})",
                op.source.degree
            )));
        }
        Ok(op)
    }

    fn hodge_laplacian(&self, k: usize, d: impl Fn(usize) -> Result<BlockOperator>, space: GradedSpace) -> Result<BlockOperator> {
        self.check_degree(k)?;
        let up = d(k)?;
        let mut m = mul(&up.adjoint().matrix, &up.matrix);
        if k > 0 {
            let down = d(k - 1)?;
            m += mul(&down.matrix, &down.adjoint().matrix);
        }
        self.checked_hermitian(self.op(space.clone(), space, m))
    }

    /// Hodge–de Rham Laplacian on `Ωᵏ`.
    pub fn laplacian_dr(&self, k: usize) -> Result<BlockOperator> {
        self.hodge_laplacian(k, |j| self.d(j), self.full(k))
    }

    /// `Δ_b = d_b d_b* + d_b* d_b` on `Ωᵏ`.
    pub fn laplacian_b(&self, k: usize) -> Result<BlockOperator> {
        self.hodge_laplacian(k, |j| self.db(j), self.full(k))
    }

    /// Laplacian of the Forman family `d_t`.
    pub fn laplacian_t(&self, k: usize, t: f64) -> Result<BlockOperator> {
        self.hodge_laplacian(k, |j| self.forman_d(j, t), self.full(k))
    }

    /// Rescaled Rumin Laplacian on `Eᵏ` (fourth order, second order through `D`).
    pub fn laplacian_rn(&self, k: usize) -> Result<BlockOperator> {
        self.check_degree(k)?;
        let n = self.n;
        let e = self.rumin(k);
        let mut m = CMatrix::zeros(e.dim(), e.dim());
        if k > 0 {
            let down = self.d_rescaled(k - 1)?;
            let dd = mul(&down.matrix, &down.adjoint().matrix);
            m += if k == n + 1 { dd } else { mul(&dd, &dd) };
        }
        if k < self.top_degree() {
            let up = self.d_rescaled(k)?;
            let dd = mul(&up.adjoint().matrix, &up.matrix);
            m += if k == n { dd } else { mul(&dd, &dd) };
        }
        self.checked_hermitian(self.op(e.clone(), e, m))
    }

    /// `(□_RN, □̄_RN) = ½(√Δ_RN ± i L_T)` on `Eᵏ`.
    pub fn box_operators(&self, k: usize) -> Result<(BlockOperator, BlockOperator)> {
        let delta = self.laplacian_rn(k)?;
        let root = hermitian_sqrt(&delta.matrix)?;
        let ilt = self.lie_t_rumin(k)?.matrix * I;
        let half = C64::new(0.5, 0.0);
        let e = self.rumin(k);
        Ok((
            self.op(e.clone(), e.clone(), (&root + &ilt) * half),
            self.op(e.clone(), e, (&root - &ilt) * half),
        ))
    }

    /// `Δ_dR` assembled from horizontal/vertical blocks,
    /// `[[Δ_b + L_T*L_T + LΛ, [d_b*, L] + [d_b, L_T*]], [[Λ, d_b] + [L_T, d_b*], Δ_b + L_T L_T* + ΛL]]`,
    /// with the vertical part identified with `Ω_Hᵏ⁻¹` via `θ∧`. With `sasakian_form`
    /// the off-diagonal blocks are `±i(∂_b - ∂̄_b)` and its adjoint instead.
    pub fn laplacian_dr_split(&self, k: usize, sasakian_form: bool) -> Result<BlockOperator> {
        self.check_degree(k)?;
        // horizontal-space operators in degree j
        let h = |j: usize| self.horizontal(j);
        let hop = |op: BlockOperator, from: usize, to: usize| self.compress(&op, &h(from), &h(to)).matrix;
        let hdim = |j: usize| h(j).dim();
        let db = |j: usize| -> Result<CMatrix> {
            if j >= 2 * self.n + 1 {
                return Ok(CMatrix::zeros(0, hdim(j)));
            }
            Ok(hop(self.db(j)?, j, j + 1))
        };
        let lie = |j: usize| -> Result<CMatrix> { Ok(hop(self.lie_t(j)?, j, j)) };
        let l = |j: usize| -> Result<CMatrix> { Ok(hop(self.lefschetz(j)?, j, j + 2)) };
        let delta_b = |j: usize| -> Result<CMatrix> {
            let up = db(j)?;
            let mut m = mul(&up.adjoint(), &up);
            if j > 0 {
                let down = db(j - 1)?;
                m += mul(&down, &down.adjoint());
            }
            Ok(m)
        };
        // Horizontal block (degree k) and vertical block (θ ∧ degree k-1).
        let hk = hdim(k);
        let vk = if k > 0 { hdim(k - 1) } else { 0 };
        let mut top_left = delta_b(k)?;
        let lk = lie(k)?;
        top_left += mul(&lk.adjoint(), &lk);
        if k >= 2 {
            let lm = l(k - 2)?;
            top_left += mul(&lm, &lm.adjoint());
        }
        let mut m = CMatrix::zeros(hk + vk, hk + vk);
        m.view_mut((0, 0), (hk, hk)).copy_from(&top_left);
        if k > 0 {
            let j = k - 1;
            let mut bottom_right = delta_b(j)?;
            let lj = lie(j)?;
            bottom_right += mul(&lj, &lj.adjoint());
            if j + 2 <= 2 * self.n {
                let lm = l(j)?;
                bottom_right += mul(&lm.adjoint(), &lm);
            }
            let off = if sasakian_form {
                let del = hop(self.del_b(j)?, j, k);
                let delbar = hop(self.delbar_b(j)?, j, k);
                (del - delbar) * I
            } else {
                // [d_b*, L] + [d_b, L_T*] : Ω_Hᵏ⁻¹ → Ω_Hᵏ
                let dbj = db(j)?;
                let mut o = mul(&dbj, &lj.adjoint()) - mul(&lk.adjoint(), &dbj);
                if j >= 1 {
                    o -= mul(&l(j - 1)?, &db(j - 1)?.adjoint());
                }
                if k + 1 <= 2 * self.n {
                    o += mul(&db(k)?.adjoint(), &l(j)?);
                }
                o
            };
            m.view_mut((0, hk), (hk, vk)).copy_from(&off);
            m.view_mut((hk, 0), (vk, hk)).copy_from(&off.adjoint());
            m.view_mut((hk, hk), (vk, vk)).copy_from(&bottom_right);
        }
        // Back to full coordinates: horizontal part, then θ ∧ (degree k-1).
        let mut basis = self.horizontal(k).embedding();
        if k > 0 {
            let vertical = mul(&self.theta_full(k - 1), &self.horizontal(k - 1).embedding());
            let mut joined = CMatrix::zeros(basis.nrows(), hk + vk);
            joined.view_mut((0, 0), (basis.nrows(), hk)).copy_from(&basis);
            joined.view_mut((0, hk), (basis.nrows(), vk)).copy_from(&vertical);
            basis = joined;
        }
        let full = mul(&mul(&basis, &m), &basis.adjoint());
        Ok(self.full_op(k, k, full))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelManifold;

    fn complex(m: usize) -> BlockComplex {
        BlockComplex::new(&FrameStructure::su2(), FunctionBlock::su2_block(m)).unwrap()
    }

    #[test]
    fn rescaling_constants() {
        let a: Vec<f64> = (0..4).map(|k| rescaling(1, k)).collect();
        assert_eq!(a[0], 1.0);
        assert_eq!(a[1], 1.0);
        assert_eq!(a[2], 1.0);
        assert!((a[3] - 1.0 / 2f64.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn d_of_constant_and_theta() {
        let c0 = complex(0);
        assert_eq!(c0.d(0).unwrap().max_abs(), 0.0);
        // d(θ) = dθ = (i/2) ε∧ε̄; in orthonormal coordinates (norm of ε∧ε̄ is 2): i
        let d1 = c0.d(1).unwrap();
        let mons1 = monomials(1, 1);
        let mons2 = monomials(1, 2);
        let col = mons1.iter().position(|m| *m == CoframeIndex::theta()).unwrap();
        let ee = CoframeIndex::new(false, &[1], &[1], 1).unwrap();
        let row = mons2.iter().position(|m| *m == ee).unwrap();
        assert!((d1.matrix[(row, col)] - I).norm() < 1e-15);
        for r in 0..mons2.len() {
            if r != row {
                assert_eq!(d1.matrix[(r, col)].norm(), 0.0);
            }
        }
    }

    #[test]
    fn d_squares_to_zero_and_splits() {
        let c = complex(2);
        for k in 0..3 {
            let dd = c.d(k + 1).unwrap().compose(&c.d(k).unwrap()).unwrap();
            assert!(dd.max_abs() < 1e-12, "k={k}");
        }
        for k in 0..=3 {
            let sum = c.d0(k).unwrap().matrix + c.db(k).unwrap().matrix + c.d_reeb(k).unwrap().matrix;
            assert!(max_abs(&(sum - c.d(k).unwrap().matrix)) < 1e-12);
        }
    }

    #[test]
    fn d_reeb_on_functions_is_theta_times_t() {
        let c = complex(1);
        let dt = c.d_reeb(0).unwrap();
        let mons1 = monomials(1, 1);
        let row = mons1.iter().position(|m| *m == CoframeIndex::theta()).unwrap();
        let dim = c.block().dim;
        let slice = dt.matrix.view((row * dim, 0), (dim, dim)).into_owned();
        assert!(max_abs(&(slice - &c.block().field_actions[0])) < 1e-15);
        assert_eq!(c.d0(0).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn adjoint_of_theta_wedge_is_interior() {
        let c = complex(1);
        for k in 0..3 {
            let t = c.theta_wedge(k).unwrap();
            let i = c.interior_t(k + 1).unwrap();
            assert!(max_abs(&(t.adjoint().matrix - i.matrix)) < 1e-15);
        }
        let lt = c.lie_t(1).unwrap();
        assert!(max_abs(&(lt.adjoint().matrix + lt.matrix)) < 1e-13);
    }

    #[test]
    fn del_parts_have_pure_bidegree() {
        let c = complex(2);
        let del = c.del_b(0).unwrap();
        // the (0,1) rows of ∂_b on functions vanish
        let mons1 = monomials(1, 1);
        let dim = c.block().dim;
        let row = mons1.iter().position(|m| *m == CoframeIndex::eps_bar(1)).unwrap();
        assert_eq!(max_abs(&del.matrix.view((row * dim, 0), (dim, dim)).into_owned()), 0.0);
        let sum = c.del_b(0).unwrap().matrix + c.delbar_b(0).unwrap().matrix;
        assert!(max_abs(&(sum - c.db(0).unwrap().matrix)) < 1e-13);
    }

    #[test]
    fn holomorphic_extremal_vector_is_cr() {
        // Z̄ acts as -(i/√2) J₊ on the right factor, killing the top weight.
        let c = complex(2);
        let delbar = c.delbar_b(0).unwrap();
        let mut v = DVector::zeros(9);
        v[2] = ONE;
        assert!(crate::linalg::vec_norm(&(&delbar.matrix * v)) < 1e-14);
    }

    #[test]
    fn non_sasakian_frame_is_rejected_for_del() {
        let frame = FrameStructure::contact_3d(1.0, 2.0).unwrap();
        let c = BlockComplex::new(&frame, FunctionBlock::constants(&frame)).unwrap();
        assert!(matches!(c.del_b(0), Err(Error::NotSasakian(_))));
        assert!(c.d(0).is_ok());
    }

    #[test]
    fn middle_operator_formulas_agree() {
        for m in 0..=3 {
            let c = complex(m);
            let d0 = c.rumin_d_middle().unwrap();
            let d1 = c.rumin_d_middle_kahler().unwrap();
            assert!(max_abs(&(d0.matrix - d1.matrix)) < 1e-12, "m={m}");
        }
    }

    #[test]
    fn rumin_complex_property() {
        let c = complex(3);
        for k in 0..3 {
            let dd = c.d_rescaled(k + 1).unwrap().compose(&c.d_rescaled(k).unwrap()).unwrap();
            assert!(dd.max_abs() < 1e-11, "k={k}");
        }
    }

    #[test]
    fn rumin_spaces_n1() {
        let c = complex(1);
        let dims: Vec<usize> = (0..4).map(|k| c.rumin(k).fiber_dim()).collect();
        assert_eq!(dims, vec![1, 2, 2, 1]);
    }

    #[test]
    fn split_assemblies_of_hodge_laplacian() {
        let c = complex(2);
        for k in 0..=3 {
            let direct = c.laplacian_dr(k).unwrap().matrix;
            for sas in [false, true] {
                let split = c.laplacian_dr_split(k, sas).unwrap().matrix;
                assert!(max_abs(&(&split - &direct)) < 1e-11, "k={k} sasakian={sas}");
            }
        }
    }

    #[test]
    fn constants_are_rumin_harmonic() {
        let model = ModelManifold::su2_model();
        let c = BlockComplex::new(model.frame(), model.block(0)).unwrap();
        assert!(c.laplacian_rn(0).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn operator_json_export() {
        let c = complex(0);
        let j = c.d(1).unwrap().to_json();
        assert_eq!(j["schema"], 1);
        assert_eq!(j["rows"], 3);
        assert_eq!(j["cols"], 3);
        assert_eq!(j["data"].as_array().unwrap().len(), 9);
    }
}
