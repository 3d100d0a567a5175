//! Spectral values compared against oracles built here, independently of the
//! operator assembly.

use nalgebra::{Complex, DMatrix};

use rumin_core::model::{FlatBundle, FrameStructure, FunctionBlock, ModelManifold};
use rumin_core::operators::BlockComplex;
use rumin_core::spectral::{self, block_spectrum, LaplacianKind, Tolerances};
use rumin_core::torsion::{decompose_degree, rumin_series};

type C64 = Complex<f64>;

fn su2(m: usize) -> BlockComplex {
    BlockComplex::new(&FrameStructure::su2(), FunctionBlock::su2_block(m)).unwrap()
}

/// Sorted eigenvalues with repetition.
fn expand(table: &spectral::SpectrumTable, k: usize) -> Vec<f64> {
    table.eigenvalues(k).into_iter().flat_map(|(l, m)| std::iter::repeat_n(l, m)).collect()
}

fn assert_close(got: &[f64], want: &[f64], rel: f64) {
    assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() <= rel * w.abs().max(1.0), "{got:?} vs {want:?}");
    }
}

/// `Δ_b` on functions of block `m` has eigenvalue `(m(m+2) − w²)/2` for each
/// weight `w ∈ {−m, −m+2, …, m}`, once per retained multiplicity weight.
fn sublaplacian_oracle(m: usize, keep: impl Fn(i64) -> bool) -> Vec<f64> {
    let weights: Vec<i64> = (-(m as i64)..=m as i64).step_by(2).collect();
    let copies = weights.iter().filter(|w| keep(**w)).count();
    let mut out = Vec::new();
    for w in &weights {
        let l = (m * (m + 2)) as f64 / 2.0 - (w * w) as f64 / 2.0;
        out.extend(std::iter::repeat_n(l, copies));
    }
    out.sort_by(f64::total_cmp);
    out
}

#[test]
fn rumin_degree_zero_is_square_of_sublaplacian() {
    for m in 0..=6 {
        let table = block_spectrum(&su2(m).laplacian_rn(0).unwrap()).unwrap();
        let mut want: Vec<f64> = sublaplacian_oracle(m, |_| true).into_iter().map(|l| l * l).collect();
        want.sort_by(f64::total_cmp);
        assert_close(&expand(&table, 0), &want, 1e-9);
    }
}

#[test]
fn lens_sublaplacian_keeps_congruent_weights() {
    for (p, l) in [(2, 0), (2, 1), (3, 1), (3, 2)] {
        let model = ModelManifold::lens_space(p, FlatBundle { character: l }).unwrap();
        for m in 0..=5 {
            let block = model.block(m);
            let want = sublaplacian_oracle(m, |w| w.rem_euclid(p as i64) == l as i64);
            if block.is_empty() {
                assert!(want.is_empty());
                continue;
            }
            let c = BlockComplex::new(model.frame(), block).unwrap();
            let table = block_spectrum(&c.laplacian_b(0).unwrap()).unwrap();
            assert_close(&expand(&table, 0), &want, 1e-9);
        }
    }
}

#[test]
fn de_rham_on_spin_half_block_from_pauli_matrices() {
    // X = iσx/√2, Y = iσy/√2, T = iσz satisfy [X,Y] = −T, [T,X] = −2Y, [T,Y] = 2X.
    let i = C64::new(0.0, 1.0);
    let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let sx = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let sy = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)]);
    let sz = DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)]);
    let (x, y, t) = (sx * i * r, sy * i * r, sz * i);
    assert!(((&x * &y - &y * &x) + &t).norm() < 1e-14);
    let casimir = -(&x * &x + &y * &y + &t * &t);
    let vals = casimir.symmetric_eigen().eigenvalues;
    // Two copies of the representation act on the 4-dimensional block.
    let mut want: Vec<f64> = vals.iter().chain(vals.iter()).copied().collect();
    want.sort_by(f64::total_cmp);
    let table = block_spectrum(&su2(1).laplacian_dr(0).unwrap()).unwrap();
    let got = expand(&table, 0);
    assert_eq!(got.len(), 4);
    assert!(got.iter().all(|v| *v > 0.0));
    assert_close(&got, &want, 1e-12);
}

/// `dim Ker Δ = dim Ker d_k − rank d_{k−1}`, ranks from a plain SVD.
fn svd_rank(m: &DMatrix<C64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.max().max(1.0);
    sv.iter().filter(|s| **s > 1e-9 * top).count()
}

#[test]
fn kernel_dimensions_match_svd_ranks() {
    for m in 0..=4 {
        let c = su2(m);
        for (kind, d) in [
            (LaplacianKind::DeRham, Box::new(|k| c.d(k).unwrap().matrix) as Box<dyn Fn(usize) -> DMatrix<C64>>),
            (LaplacianKind::Rumin, Box::new(|k| c.d_rumin(k).unwrap().matrix)),
        ] {
            for k in 0..=3 {
                let dim = kind.assemble(&c, k).unwrap().matrix.nrows();
                let ker_d = if k < 3 { dim - svd_rank(&d(k)) } else { dim };
                let im = if k > 0 { svd_rank(&d(k - 1)) } else { 0 };
                let table = block_spectrum(&kind.assemble(&c, k).unwrap()).unwrap();
                assert_eq!(table.kernel_dim(k), ker_d - im, "{} m={m} k={k}", kind.label());
            }
        }
    }
}

#[test]
fn spin_half_functions_split_evenly_between_one_sided_pieces() {
    let d = decompose_degree(&su2(1), 0, &Tolerances::default()).unwrap();
    assert_eq!(d.kernel_dim, 0);
    assert_eq!(d.ker_im.len(), 2);
    assert_eq!(d.im_ker.len(), 2);
    assert!(d.im_im.is_empty());
    assert_close(&d.lhs, &[1.0; 4], 1e-12);
}

#[test]
fn balanced_q_spaces_carry_no_reeb_frequency() {
    for m in [2, 4] {
        let c = su2(m);
        let table = spectral::tagged_block_spectrum(&c, LaplacianKind::Rumin, 0).unwrap();
        for e in &table.entries {
            let (Some(a), Some(b), Some(nu)) = (e.lambda10, e.lambda01, e.nu) else { continue };
            assert!(((a - b).abs() - nu.abs()).abs() < 1e-9, "{e:?}");
            if (a - b).abs() < 1e-12 {
                assert!(nu.abs() < 1e-9);
            }
        }
    }
}

#[test]
fn rumin_series_contains_squared_sublaplacian() {
    // Degree 0 is the squared sublaplacian; d_N carries it injectively into degree 1.
    let series = rumin_series(&ModelManifold::su2_model(), 4).unwrap();
    let mut want: Vec<f64> = (1..=4).flat_map(|m| sublaplacian_oracle(m, |_| true)).map(|l| l * l).collect();
    want.sort_by(f64::total_cmp);
    let flat = |k: usize| -> Vec<f64> {
        series[k].eigenvalues.iter().flat_map(|(l, m)| std::iter::repeat_n(*l, *m)).collect()
    };
    assert_close(&flat(0), &want, 1e-9);
    let mut rest = flat(1);
    for w in &want {
        let at = rest.iter().position(|v| (v - w).abs() <= 1e-9 * w).expect("degree-0 eigenvalue missing in degree 1");
        rest.remove(at);
    }
    assert!(!rest.is_empty());
}
