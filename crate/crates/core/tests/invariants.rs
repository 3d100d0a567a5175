use nalgebra::Complex;
use proptest::prelude::*;

use rumin_core::exterior::{conjugate, monomials, norm, wedge, PointwiseForm};
use rumin_core::linalg::{hermitian_eigen, max_abs, CMatrix};
use rumin_core::model::{FlatBundle, FrameStructure, FunctionBlock, ModelManifold};
use rumin_core::operators::BlockComplex;
use rumin_core::spectral::{block_spectrum, kernel, LaplacianKind};
use rumin_core::torsion::{signed_mismatch, zeta_partial, ZetaSeries};

type C64 = Complex<f64>;

fn su2_complex(m: usize) -> BlockComplex {
    BlockComplex::new(&FrameStructure::su2(), FunctionBlock::su2_block(m)).unwrap()
}

fn lens_complex(m: usize, p: usize, l: usize) -> Option<BlockComplex> {
    let model = ModelManifold::lens_space(p, FlatBundle { character: l }).unwrap();
    let block = model.block(m);
    (!block.is_empty()).then(|| BlockComplex::new(model.frame(), block).unwrap())
}

fn kind_strategy() -> impl Strategy<Value = LaplacianKind> {
    prop_oneof![
        Just(LaplacianKind::Rumin),
        Just(LaplacianKind::DeRham),
        Just(LaplacianKind::Tangential),
        (0.05f64..5.0).prop_map(|t| LaplacianKind::Forman { t }),
    ]
}

fn form_strategy(degree: usize) -> impl Strategy<Value = PointwiseForm> {
    let basis = monomials(1, degree);
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), basis.len()).prop_map(move |cs| {
        let mut f = PointwiseForm::zero(1);
        for (idx, (re, im)) in basis.iter().zip(cs) {
            f.add_term(idx.clone(), C64::new(re, im));
        }
        f
    })
}

fn commutator(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a * b - b * a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn forman_differential_squares_to_zero(m in 0usize..5, t in 0.0f64..20.0, k in 0usize..2) {
        let c = su2_complex(m);
        let dd = c.forman_d(k + 1, t).unwrap().matrix * c.forman_d(k, t).unwrap().matrix;
        let scale = (1.0 + t * t).powi(2) * (m as f64 + 1.0).powi(2);
        prop_assert!(max_abs(&dd) <= 1e-12 * scale, "residual {}", max_abs(&dd));
    }

    #[test]
    fn laplacians_are_hermitian_and_nonnegative(m in 0usize..5, k in 0usize..4, kind in kind_strategy()) {
        let c = su2_complex(m);
        let op = kind.assemble(&c, k).unwrap();
        let (values, _) = hermitian_eigen(&op.matrix).unwrap();
        let scale = max_abs(&op.matrix).max(1.0);
        prop_assert!(values.iter().all(|v| *v >= -1e-9 * scale), "min {:?}", values.first());
    }

    #[test]
    fn reeb_derivative_commutes_with_rumin_laplacian(m in 0usize..5, k in 0usize..4) {
        let c = su2_complex(m);
        let lap = c.laplacian_rn(k).unwrap().matrix;
        let lt = c.lie_t_rumin(k).unwrap().matrix;
        prop_assert!(commutator(&lap, &lt) <= 1e-9 * max_abs(&lap).max(1.0));
    }

    #[test]
    fn multiplicities_sum_to_dimension(m in 0usize..5, k in 0usize..4, kind in kind_strategy()) {
        let c = su2_complex(m);
        let op = kind.assemble(&c, k).unwrap();
        let table = block_spectrum(&op).unwrap();
        prop_assert_eq!(table.entries.iter().map(|e| e.multiplicity).sum::<usize>(), op.matrix.nrows());
    }

    #[test]
    fn lens_multiplicities_sum_to_dimension(m in 0usize..6, p in 2usize..4, l in 0usize..3, k in 0usize..4) {
        prop_assume!(l < p);
        if let Some(c) = lens_complex(m, p, l) {
            let op = c.laplacian_rn(k).unwrap();
            let table = block_spectrum(&op).unwrap();
            prop_assert_eq!(table.entries.iter().map(|e| e.multiplicity).sum::<usize>(), op.matrix.nrows());
        }
    }

    #[test]
    fn kernel_basis_is_orthonormal(m in 0usize..4, k in 0usize..4, kind in kind_strategy()) {
        let c = su2_complex(m);
        let ker = kernel(&kind.assemble(&c, k).unwrap(), None).unwrap();
        let gram = ker.vectors.adjoint() * &ker.vectors;
        let id = CMatrix::identity(ker.dim(), ker.dim());
        prop_assert!(max_abs(&(gram - id)) <= 1e-12);
    }

    #[test]
    fn zeta_decreases_in_s_above_one(values in prop::collection::vec(1.01f64..100.0, 1..20), s in 2.0f64..5.0, ds in 0.1f64..2.0) {
        let z = ZetaSeries::from_values("z", &values).unwrap();
        prop_assert_eq!(z.total_multiplicity(), values.len());
        prop_assert!(zeta_partial(&z, s + ds).unwrap() < zeta_partial(&z, s).unwrap());
    }

    #[test]
    fn signed_mismatch_ignores_order(values in prop::collection::vec(0.5f64..50.0, 1..12), seed in any::<u64>()) {
        let mut shuffled = values.clone();
        let mut state = seed;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (state >> 33) as usize % (i + 1));
        }
        let (defect, _) = signed_mismatch(&[(&values, 2)], &[(&shuffled, 1), (&values, 1)], 1e-9);
        prop_assert!(defect <= 1e-12);
    }

    #[test]
    fn wedge_is_associative(a in form_strategy(1), b in form_strategy(1), c in form_strategy(1)) {
        let left = wedge(&wedge(&a, &b).unwrap(), &c).unwrap();
        let right = wedge(&a, &wedge(&b, &c).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right) <= 1e-12);
    }

    #[test]
    fn wedge_is_graded_commutative(a in form_strategy(1), b in form_strategy(2)) {
        // Degrees 1 and 2: the sign is +1.
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        prop_assert!(ab.max_abs_diff(&ba) <= 1e-12);
        let aa = wedge(&a, &a).unwrap();
        prop_assert!(aa.max_abs_diff(&PointwiseForm::zero(1)) <= 1e-12);
    }

    #[test]
    fn conjugation_is_an_isometric_involution(a in form_strategy(2)) {
        let c = conjugate(&a);
        prop_assert!(conjugate(&c).max_abs_diff(&a) <= 1e-12);
        prop_assert!((norm(&c) - norm(&a)).abs() <= 1e-12 * norm(&a).max(1.0));
    }
}
