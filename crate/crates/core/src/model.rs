//! Homogeneous Sasakian models: `SU(2) ≅ S³`, lens quotients `L(p;1)` and
//! their flat line bundles, realized block by block through Peter–Weyl.
//!
//! The real frame is ordered `T, X₁, Y₁, …, Xₙ, Yₙ`; the complex frame is
//! `T, Z₁..Zₙ, Z̄₁..Z̄ₙ` with `Zⱼ = (Xⱼ - iYⱼ)/2`, dual to `θ, εʲ, ε̄ʲ`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{ContactAlgebra, CoframeIndex, PointwiseForm, C64, I, ONE, ZERO};

const STRUCTURE_TOL: f64 = 1e-12;

/// Lie brackets of a left-invariant frame plus the CR structure on `H`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameStructure {
    n: usize,
    /// `brackets[(a * dim + b) * dim + c]` is the `V_c` coefficient of `[V_a, V_b]`.
    brackets: Vec<f64>,
    /// `J` on the horizontal frame, column `b` is `J V_{b+1}`.
    j_matrix: DMatrix<f64>,
}

impl FrameStructure {
    /// Builds a frame from bracket constants and `J`, validating the contact
    /// metric conditions (not the Sasakian ones; see [`Self::check_sasakian`]).
    pub fn new(n: usize, brackets: Vec<f64>, j_matrix: DMatrix<f64>) -> Result<Self> {
        let dim = 2 * n + 1;
        if n == 0 || n > crate::exterior::MAX_N {
            return Err(Error::InvalidParameter(format!("unsupported n = {n}")));
        }
        if brackets.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch { left: brackets.len(), right: dim * dim * dim });
        }
        if j_matrix.shape() != (2 * n, 2 * n) {
            return Err(Error::DimensionMismatch { left: j_matrix.nrows(), right: 2 * n });
        }
        let frame = FrameStructure { n, brackets, j_matrix };
        frame.check_contact_metric()?;
        Ok(frame)
    }

    /// `su(2)` with `[X,Y] = -T`, `[T,X] = -2Y`, `[T,Y] = 2X`, `JX = Y`.
    pub fn su2() -> Self {
        Self::contact_3d(1.0, 1.0).expect("su(2) frame is a valid contact metric frame")
    }

    /// Three-dimensional contact metric frame with `[X,Y] = -T`,
    /// `[T,X] = -2βY`, `[T,Y] = 2γX`. Sasakian iff `β = γ`.
    pub fn contact_3d(beta: f64, gamma: f64) -> Result<Self> {
        let mut c = vec![0.0; 27];
        let mut set = |a: usize, b: usize, k: usize, v: f64| {
            c[(a * 3 + b) * 3 + k] = v;
            c[(b * 3 + a) * 3 + k] = -v;
        };
        set(1, 2, 0, -1.0);
        set(0, 1, 2, -2.0 * beta);
        set(0, 2, 1, 2.0 * gamma);
        let j = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        Self::new(1, c, j)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn bracket(&self, a: usize, b: usize, c: usize) -> f64 {
        let d = self.dim();
        self.brackets[(a * d + b) * d + c]
    }

    pub fn j_matrix(&self) -> &DMatrix<f64> {
        &self.j_matrix
    }

    /// Nonzero bracket constants as `(a, b, c, value)` with `a < b`.
    pub fn nonzero_brackets(&self) -> Vec<(usize, usize, usize, f64)> {
        let d = self.dim();
        let mut out = Vec::new();
        for a in 0..d {
            for b in a + 1..d {
                for c in 0..d {
                    let v = self.bracket(a, b, c);
                    if v != 0.0 {
                        out.push((a, b, c, v));
                    }
                }
            }
        }
        out
    }

    /// `dθ(V_a, V_b) = -θ([V_a, V_b])` on the real frame.
    pub fn dtheta_real(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |a, b| -self.bracket(a, b, 0))
    }

    fn check_contact_metric(&self) -> Result<()> {
        let d = self.dim();
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    if (self.bracket(a, b, c) + self.bracket(b, a, c)).abs() > STRUCTURE_TOL {
                        return bad(format!("bracket constants not antisymmetric at ({a},{b},{c})"));
                    }
                }
            }
        }
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        let jac: f64 = (0..d)
                            .map(|k| {
                                self.bracket(a, b, k) * self.bracket(k, c, e)
                                    + self.bracket(b, c, k) * self.bracket(k, a, e)
                                    + self.bracket(c, a, k) * self.bracket(k, b, e)
                            })
                            .sum();
                        if jac.abs() > STRUCTURE_TOL {
                            return bad(format!("Jacobi identity fails for ({a},{b},{c})"));
                        }
                    }
                }
            }
        }
        let dt = self.dtheta_real();
        if (0..d).any(|b| dt[(0, b)].abs() > STRUCTURE_TOL) {
            return bad("ι_T dθ ≠ 0, T is not the Reeb field".into());
        }
        let horizontal = dt.view((1, 1), (2 * self.n, 2 * self.n)).into_owned();
        if horizontal.determinant().abs() < STRUCTURE_TOL {
            return bad("θ∧(dθ)ⁿ = 0, structure is not contact".into());
        }
        let j = &self.j_matrix;
        if (j * j + DMatrix::identity(2 * self.n, 2 * self.n)).amax() > STRUCTURE_TOL {
            return bad("J² ≠ -1 on H".into());
        }
        // g(U, V) = dθ(U, JV) on H must be the identity in the frame.
        let g = &horizontal * j;
        if (g - DMatrix::identity(2 * self.n, 2 * self.n)).amax() > STRUCTURE_TOL {
            return bad("frame is not orthonormal for dθ(·, J·) + θ⊗θ".into());
        }
        Ok(())
    }

    /// Matrix of `ad_T` on `H` in the horizontal frame.
    pub fn ad_t_horizontal(&self) -> DMatrix<f64> {
        let h = 2 * self.n;
        DMatrix::from_fn(h, h, |r, c| self.bracket(0, c + 1, r + 1))
    }

    /// Checks `L_T J = 0` and integrability of `H^{1,0}`.
    pub fn check_sasakian(&self) -> Result<()> {
        let ad = self.ad_t_horizontal();
        let comm = &ad * &self.j_matrix - &self.j_matrix * &ad;
        if comm.amax() > STRUCTURE_TOL {
            return Err(Error::NotSasakian(format!("L_T J ≠ 0 (|[ad_T, J]| = {:e})", comm.amax())));
        }
        let cc = self.complex_constants();
        let n = self.n;
        for a in 1..=n {
            for b in 1..=n {
                for c in 0..self.dim() {
                    if (1..=n).contains(&c) {
                        continue;
                    }
                    let v = cc[(a * self.dim() + b) * self.dim() + c];
                    if v.norm() > STRUCTURE_TOL {
                        return Err(Error::NotSasakian(format!("[Z{a}, Z{b}] leaves H^(1,0)")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_sasakian(&self) -> bool {
        self.check_sasakian().is_ok()
    }

    /// Real frame coefficients of the complex frame: row `a` expresses `W_a`.
    pub fn complex_frame(&self) -> DMatrix<C64> {
        let n = self.n;
        let mut w = DMatrix::zeros(self.dim(), self.dim());
        w[(0, 0)] = ONE;
        for j in 1..=n {
            let (x, y) = (2 * j - 1, 2 * j);
            w[(j, x)] = C64::new(0.5, 0.0);
            w[(j, y)] = C64::new(0.0, -0.5);
            w[(n + j, x)] = C64::new(0.5, 0.0);
            w[(n + j, y)] = C64::new(0.0, 0.5);
        }
        w
    }

    /// Bracket constants of the complex frame, same layout as the real ones.
    pub fn complex_constants(&self) -> Vec<C64> {
        let d = self.dim();
        let w = self.complex_frame();
        let w_inv = w.clone().try_inverse().expect("complex frame is invertible");
        let mut out = vec![ZERO; d * d * d];
        for a in 0..d {
            for b in 0..d {
                // [W_a, W_b] in the real frame
                let mut real = vec![ZERO; d];
                for i in 0..d {
                    for j in 0..d {
                        let coeff = w[(a, i)] * w[(b, j)];
                        if coeff == ZERO {
                            continue;
                        }
                        for (k, r) in real.iter_mut().enumerate() {
                            *r += coeff * self.bracket(i, j, k);
                        }
                    }
                }
                // V_k = Σ_c w_inv[k][c] W_c
                for c in 0..d {
                    out[(a * d + b) * d + c] = (0..d).map(|k| real[k] * w_inv[(k, c)]).sum();
                }
            }
        }
        out
    }

    /// Exterior derivative of each complex coframe element,
    /// `dω^c = -Σ_{a<b} C_ab^c ω^a∧ω^b`, indexed by coframe position.
    pub fn coframe_differentials(&self) -> Vec<PointwiseForm> {
        let d = self.dim();
        let n = self.n;
        let cc = self.complex_constants();
        (0..d)
            .map(|c| {
                let mut form = PointwiseForm::zero(n);
                for a in 0..d {
                    for b in a + 1..d {
                        let v = cc[(a * d + b) * d + c];
                        if v.norm() > 0.0 {
                            let (idx, sign) = CoframeIndex::from_positions(&[a, b], n).expect("a < b");
                            form.add_term(idx, -v * sign);
                        }
                    }
                }
                prune_rounding(form)
            })
            .collect()
    }

    /// `dθ` as a pointwise 2-form in the complex coframe.
    pub fn dtheta(&self) -> PointwiseForm {
        self.coframe_differentials().swap_remove(0)
    }

    pub fn contact_algebra(&self) -> Result<ContactAlgebra> {
        ContactAlgebra::with_dtheta(self.dtheta())
    }
}

/// Removes coefficients that are pure rounding noise of exact zeros.
fn prune_rounding(form: PointwiseForm) -> PointwiseForm {
    let n = form.n();
    let mut out = PointwiseForm::zero(n);
    for (k, c) in form.terms() {
        let re = if c.re.abs() < 1e-15 { 0.0 } else { c.re };
        let im = if c.im.abs() < 1e-15 { 0.0 } else { c.im };
        out.add_term(*k, C64::new(re, im));
    }
    out
}

/// Spin `m/2` representation in the weight basis `w = -m, -m+2, …, m`:
/// returns `(J₊, J_z)` with `J₊|w⟩ = ½√((m-w)(m+w+2)) |w+2⟩`, `J_z|w⟩ = (w/2)|w⟩`.
pub fn spin_matrices(m: usize) -> (DMatrix<C64>, DMatrix<C64>) {
    let d = m + 1;
    let mut jp = DMatrix::zeros(d, d);
    let mut jz = DMatrix::zeros(d, d);
    for a in 0..d {
        let w = 2 * a as i64 - m as i64;
        jz[(a, a)] = C64::new(w as f64 / 2.0, 0.0);
        if a + 1 < d {
            let mi = m as i64;
            jp[(a + 1, a)] = C64::new((((mi - w) * (mi + w + 2)) as f64).sqrt() / 2.0, 0.0);
        }
    }
    (jp, jz)
}

/// `su(2)` frame `(T, X, Y)` acting in the spin `m/2` representation.
pub fn su2_frame_rep(m: usize) -> [DMatrix<C64>; 3] {
    let (jp, jz) = spin_matrices(m);
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * C64::new(0.5, 0.0);
    let jy = (&jp - &jm) * C64::new(0.0, -0.5);
    let s = C64::new(0.0, -std::f64::consts::SQRT_2);
    [jz * (I * 2.0), jx * s, jy * s]
}

/// Identifies a block: Peter–Weyl weight plus the quotient data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BlockId {
    pub weight: usize,
    pub p: usize,
    pub character: usize,
}

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p == 1 {
            write!(f, "m{}", self.weight)
        } else {
            write!(f, "m{}/p{}l{}", self.weight, self.p, self.character)
        }
    }
}

/// Finite invariant function space with exact actions of the real frame.
#[derive(Clone, Debug)]
pub struct FunctionBlock {
    pub id: BlockId,
    pub dim: usize,
    /// Actions of `T, X₁, Y₁, …` in an orthonormal function basis.
    pub field_actions: Vec<DMatrix<C64>>,
    /// Weights of the multiplicity factor retained by the quotient.
    pub left_weights: Vec<i64>,
    /// Character index of the flat bundle (`None` when untwisted).
    pub character_twist: Option<usize>,
}

impl FunctionBlock {
    /// Constant functions: dimension 1, every field acts by zero. Valid over
    /// any frame.
    pub fn constants(frame: &FrameStructure) -> Self {
        FunctionBlock {
            id: BlockId { weight: 0, p: 1, character: 0 },
            dim: 1,
            field_actions: vec![DMatrix::zeros(1, 1); frame.dim()],
            left_weights: vec![0],
            character_twist: None,
        }
    }

    /// Full `S³` block of weight `m`: fields act on the right tensor factor.
    pub fn su2_block(m: usize) -> Self {
        let id = DMatrix::<C64>::identity(m + 1, m + 1);
        let field_actions = su2_frame_rep(m).iter().map(|r| id.kronecker(r)).collect();
        FunctionBlock {
            id: BlockId { weight: m, p: 1, character: 0 },
            dim: (m + 1) * (m + 1),
            field_actions,
            left_weights: (0..=m).map(|a| 2 * a as i64 - m as i64).collect(),
            character_twist: None,
        }
    }

    /// `χ_l`-equivariant part of the weight-`m` block under `ℤ/p`, acting by
    /// `ζ^w` on left weight `w`.
    pub fn lens_block(m: usize, p: usize, character: usize) -> Self {
        let full = Self::su2_block(m);
        let keep: Vec<usize> = (0..=m)
            .filter(|a| (2 * *a as i64 - m as i64).rem_euclid(p as i64) == character as i64)
            .collect();
        let rows: Vec<usize> = keep.iter().flat_map(|a| (0..=m).map(move |r| a * (m + 1) + r)).collect();
        let field_actions = full.field_actions.iter().map(|a| a.select_rows(&rows).select_columns(&rows)).collect();
        FunctionBlock {
            id: BlockId { weight: m, p, character },
            dim: rows.len(),
            field_actions,
            left_weights: keep.iter().map(|a| 2 * *a as i64 - m as i64).collect(),
            character_twist: (character != 0).then_some(character),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.dim == 0
    }

    /// Actions of the complex frame `T, Z₁..Zₙ, Z̄₁..Z̄ₙ`.
    pub fn complex_actions(&self, frame: &FrameStructure) -> Vec<DMatrix<C64>> {
        let w = frame.complex_frame();
        (0..frame.dim())
            .map(|a| {
                let mut m = DMatrix::zeros(self.dim, self.dim);
                for (i, act) in self.field_actions.iter().enumerate() {
                    if w[(a, i)] != ZERO {
                        m += act * w[(a, i)];
                    }
                }
                m
            })
            .collect()
    }

    /// Action of the `ℤ/p` generator on the full weight-`m` block.
    pub fn generator_action(m: usize, p: usize) -> DMatrix<C64> {
        let zeta = |w: i64| C64::from_polar(1.0, 2.0 * PI * w as f64 / p as f64);
        let left = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            m + 1,
            (0..=m).map(|a| zeta(2 * a as i64 - m as i64)),
        ));
        left.kronecker(&DMatrix::<C64>::identity(m + 1, m + 1))
    }

    /// Largest deviation of `[A_a, A_b]` from the bracket constants.
    pub fn bracket_residual(&self, frame: &FrameStructure) -> f64 {
        let d = frame.dim();
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                let (fa, fb) = (&self.field_actions[a], &self.field_actions[b]);
                let mut r = fa * fb - fb * fa;
                for c in 0..d {
                    r -= &self.field_actions[c] * C64::new(frame.bracket(a, b, c), 0.0);
                }
                worst = worst.max(r.iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// Largest entry of `A + A†` over all field actions.
    pub fn skew_residual(&self) -> f64 {
        self.field_actions
            .iter()
            .map(|a| (a + a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }
}

/// Rank-one flat bundle given by a character of `ℤ/p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatBundle {
    pub character: usize,
}

impl FlatBundle {
    pub const TRIVIAL: FlatBundle = FlatBundle { character: 0 };

    pub fn rank(&self) -> usize {
        1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelKind {
    Sphere,
    Lens { p: usize, character: usize },
}

/// A compact homogeneous Sasakian model with a flat line bundle.
#[derive(Clone, Debug)]
pub struct ModelManifold {
    frame: FrameStructure,
    kind: ModelKind,
}

/// Volume of `S³` for the frame normalization of [`FrameStructure::su2`]:
/// the Reeb orbits have length `2π` and `∫ dθ` over the base is `2π`.
pub const S3_VOLUME: f64 = 4.0 * PI * PI;

impl ModelManifold {
    pub fn su2_model() -> Self {
        ModelManifold { frame: FrameStructure::su2(), kind: ModelKind::Sphere }
    }

    pub fn lens_space(p: usize, bundle: FlatBundle) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidParameter("p must be at least 1".into()));
        }
        if bundle.character >= p {
            return Err(Error::InvalidParameter(format!(
                "character {} is not in 0..{p}",
                bundle.character
            )));
        }
        Ok(ModelManifold { frame: FrameStructure::su2(), kind: ModelKind::Lens { p, character: bundle.character } })
    }

    pub fn frame(&self) -> &FrameStructure {
        &self.frame
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn fundamental_group_order(&self) -> usize {
        match self.kind {
            ModelKind::Sphere => 1,
            ModelKind::Lens { p, .. } => p,
        }
    }

    pub fn character(&self) -> usize {
        match self.kind {
            ModelKind::Sphere => 0,
            ModelKind::Lens { character, .. } => character,
        }
    }

    pub fn volume(&self) -> f64 {
        S3_VOLUME / self.fundamental_group_order() as f64
    }

    pub fn block(&self, m: usize) -> FunctionBlock {
        match self.kind {
            ModelKind::Sphere => FunctionBlock::su2_block(m),
            ModelKind::Lens { p, character } => FunctionBlock::lens_block(m, p, character),
        }
    }

    /// Blocks of weight `0..=max_weight` (possibly empty for twisted quotients).
    pub fn blocks(&self, max_weight: usize) -> Vec<FunctionBlock> {
        (0..=max_weight).map(|m| self.block(m)).collect()
    }

    pub fn descriptor(&self, max_weight: usize) -> ModelDescriptor {
        ModelDescriptor {
            schema: 1,
            model: self.kind,
            max_weight,
            n: self.frame.n(),
            brackets: self.frame.nonzero_brackets(),
            volume: self.volume(),
        }
    }

    pub fn from_descriptor(desc: &ModelDescriptor) -> Result<Self> {
        if desc.schema != 1 {
            return Err(Error::InvalidParameter(format!("unsupported descriptor schema {}", desc.schema)));
        }
        let model = match desc.model {
            ModelKind::Sphere => Self::su2_model(),
            ModelKind::Lens { p, character } => Self::lens_space(p, FlatBundle { character })?,
        };
        if desc.brackets != model.frame.nonzero_brackets() {
            return Err(Error::InvalidParameter("descriptor frame constants do not match the model".into()));
        }
        Ok(model)
    }
}

/// Serializable description of a model run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub schema: u32,
    pub model: ModelKind,
    pub max_weight: usize,
    pub n: usize,
    pub brackets: Vec<(usize, usize, usize, f64)>,
    pub volume: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::wedge;

    #[test]
    fn su2_dtheta_is_levi_form() {
        let f = FrameStructure::su2();
        let dt = f.dtheta_real();
        assert_eq!(dt[(1, 2)], 1.0);
        assert_eq!(dt[(2, 1)], -1.0);
        // dθ = e∧f = (i/2) ε∧ε̄
        let e = PointwiseForm::e(1, 1);
        let fo = PointwiseForm::f(1, 1);
        assert!(f.dtheta().max_abs_diff(&wedge(&e, &fo).unwrap()) < 1e-15);
        let vol = wedge(&PointwiseForm::theta(1), &f.dtheta()).unwrap();
        assert!(vol.max_abs_diff(f.contact_algebra().unwrap().volume_form()) < 1e-15);
    }

    #[test]
    fn su2_is_sasakian_and_deformation_is_not() {
        assert!(FrameStructure::su2().is_sasakian());
        let bent = FrameStructure::contact_3d(1.0, 2.0).unwrap();
        assert!(matches!(bent.check_sasakian(), Err(Error::NotSasakian(_))));
    }

    #[test]
    fn lie_t_commutes_with_j() {
        let f = FrameStructure::su2();
        let ad = f.ad_t_horizontal();
        assert!((&ad * f.j_matrix() - f.j_matrix() * &ad).amax() == 0.0);
    }

    #[test]
    fn bad_frames_are_rejected() {
        let mut c = vec![0.0; 27];
        c[(3 + 2) * 3] = -1.0; // [X,Y] = -T without the antisymmetric partner
        let j = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(FrameStructure::new(1, c, j.clone()).is_err());
        // abelian: not contact
        assert!(FrameStructure::new(1, vec![0.0; 27], j).is_err());
    }

    #[test]
    fn complex_brackets() {
        let f = FrameStructure::su2();
        let cc = f.complex_constants();
        // [Z, Z̄] = -(i/2) T
        let z = cc[(3 + 2) * 3];
        assert!((z - C64::new(0.0, -0.5)).norm() < 1e-15);
        // [T, Z] = -2i Z
        assert!((cc[(0 * 3 + 1) * 3 + 1] - C64::new(0.0, -2.0)).norm() < 1e-15);
        let d = f.coframe_differentials();
        // dε = 2i θ∧ε
        let te = CoframeIndex::eps(1).with_theta();
        assert!((d[1].coeff(&te) - C64::new(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn block_dims() {
        let s3 = ModelManifold::su2_model();
        for (m, b) in s3.blocks(5).iter().enumerate() {
            assert_eq!(b.dim, (m + 1) * (m + 1));
        }
        let b0 = s3.block(0);
        assert!(b0.field_actions.iter().all(|a| crate::linalg::max_abs(a) == 0.0));
    }

    #[test]
    fn block_brackets_and_skewness() {
        let f = FrameStructure::su2();
        for m in 0..=6 {
            let b = FunctionBlock::su2_block(m);
            assert!(b.bracket_residual(&f) < 1e-12, "m={m}");
            assert!(b.skew_residual() < 1e-13);
        }
    }

    #[test]
    fn t_spectrum_is_imaginary_and_symmetric() {
        let b = FunctionBlock::su2_block(2);
        let t = &b.field_actions[0];
        // T is diagonal in the weight basis with entries i·w
        let mut diag: Vec<f64> = (0..b.dim).map(|i| t[(i, i)].im).collect();
        assert!((0..b.dim).all(|i| t[(i, i)].re == 0.0));
        diag.sort_by(f64::total_cmp);
        let mut neg: Vec<f64> = diag.iter().map(|x| -x).collect();
        neg.sort_by(f64::total_cmp);
        assert_eq!(diag, neg);
    }

    #[test]
    fn lens_blocks() {
        let trivial = ModelManifold::lens_space(1, FlatBundle::TRIVIAL).unwrap();
        let s3 = ModelManifold::su2_model();
        for m in 0..4 {
            assert_eq!(trivial.block(m).dim, s3.block(m).dim);
        }
        let twisted = ModelManifold::lens_space(2, FlatBundle { character: 1 }).unwrap();
        assert_eq!(twisted.block(0).dim, 0);
        assert!(ModelManifold::lens_space(2, FlatBundle { character: 2 }).is_err());
    }

    #[test]
    fn lens_dims_match_generator_eigenspaces() {
        for p in 2..=4 {
            for l in 0..p {
                let model = ModelManifold::lens_space(p, FlatBundle { character: l }).unwrap();
                for m in 0..=4 {
                    let g = FunctionBlock::generator_action(m, p);
                    let chi = C64::from_polar(1.0, 2.0 * PI * l as f64 / p as f64);
                    let count = (0..g.nrows()).filter(|i| (g[(*i, *i)] - chi).norm() < 1e-12).count();
                    assert_eq!(model.block(m).dim, count, "p={p} l={l} m={m}");
                }
            }
        }
    }

    #[test]
    fn volumes() {
        let s3 = ModelManifold::su2_model();
        let l2 = ModelManifold::lens_space(2, FlatBundle::TRIVIAL).unwrap();
        assert!(s3.volume() > 0.0);
        assert!((l2.volume() - s3.volume() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn descriptor_roundtrip() {
        let model = ModelManifold::lens_space(3, FlatBundle { character: 2 }).unwrap();
        let desc = model.descriptor(4);
        let json = serde_json::to_string(&desc).unwrap();
        assert!(json.contains("\"schema\":1"));
        let back: ModelDescriptor = serde_json::from_str(&json).unwrap();
        let rebuilt = ModelManifold::from_descriptor(&back).unwrap();
        assert_eq!(rebuilt.kind(), model.kind());
    }
}
