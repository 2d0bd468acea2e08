mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use qaep::linops::{
    eig, eigvals, fidelity, matrix_function, operator_geq, partial_trace, permute_subsystems,
    positive_part, positive_part_trace, purified_distance, singular_values, svd, tensor_product,
};
use qaep::state::random_density;
use qaep::{HermitianMatrix, Matrix};

fn hermitian(n: usize, entries: &[f64]) -> HermitianMatrix {
    let m = Matrix::from_fn(n, n, |i, j| {
        let k = 2 * (i * n + j);
        Complex64::new(entries[k], entries[k + 1])
    });
    HermitianMatrix::new(m.add(&m.adjoint()).scale_real(0.5)).unwrap()
}

fn hermitian_strategy(max_dim: usize) -> impl Strategy<Value = HermitianMatrix> {
    (1..=max_dim).prop_flat_map(|n| {
        prop::collection::vec(-1.0..1.0f64, 2 * n * n).prop_map(move |e| hermitian(n, &e))
    })
}

fn square_strategy(max_dim: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
        prop::collection::vec(-1.0..1.0f64, 2 * r * c).prop_map(move |e| {
            Matrix::from_fn(r, c, |i, j| {
                Complex64::new(e[2 * (i * c + j)], e[2 * (i * c + j) + 1])
            })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn eigen_reconstruction(h in hermitian_strategy(12)) {
        let s = eig(&h).unwrap();
        prop_assert!(s.reconstruct().max_abs_diff(&h) <= 1e-12);
        prop_assert!(s.vectors.isometry_defect() <= 1e-12);
        prop_assert!(s.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eigenvalues_match_jacobi(h in hermitian_strategy(8)) {
        let ours = eigvals(&h).unwrap();
        let reference = common::eigvals(&common::dense(&h));
        for (a, b) in ours.iter().zip(&reference) {
            prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn svd_reconstruction(a in square_strategy(7)) {
        let d = svd(&a).unwrap();
        let mut scaled = d.u.clone();
        for j in 0..d.values.len() {
            for i in 0..scaled.rows() {
                scaled[(i, j)] *= d.values[j];
            }
        }
        prop_assert!(scaled.matmul(&d.v.adjoint()).max_abs_diff(&a) <= 1e-12);
        prop_assert!(d.values.windows(2).all(|w| w[0] >= w[1]));
        // Singular values squared are the eigenvalues of A^dag A.
        let gram = HermitianMatrix::new(a.adjoint_matmul(&a)).unwrap();
        let mut ev: Vec<f64> = eigvals(&gram).unwrap().into_iter().rev().collect();
        ev.truncate(d.values.len());
        for (s, e) in singular_values(&a).unwrap().iter().zip(&ev) {
            prop_assert!((s * s - e).abs() <= 1e-11);
        }
    }

    #[test]
    fn partial_trace_matches_index_loops(seed in any::<u64>(), da in 1..4usize, db in 1..4usize) {
        let rho = random_density::<f64>(da * db, da * db, seed).unwrap();
        let d = common::dense(rho.matrix());
        let b = partial_trace(rho.matrix(), &[da, db], &[1]).unwrap();
        let a = partial_trace(rho.matrix(), &[da, db], &[0]).unwrap();
        prop_assert!(b.max_abs_diff(&common::from_dense(&common::trace_a(&d, da, db))) <= 1e-15);
        prop_assert!(a.max_abs_diff(&common::from_dense(&common::trace_b(&d, da, db))) <= 1e-15);
    }

    #[test]
    fn partial_trace_of_product(s1 in any::<u64>(), s2 in any::<u64>(), da in 1..4usize, db in 1..4usize) {
        let x = random_density::<f64>(da, da, s1).unwrap();
        let y = random_density::<f64>(db, db, s2).unwrap();
        let xy = tensor_product(x.matrix(), y.matrix()).unwrap();
        prop_assert!(partial_trace(&xy, &[da, db], &[0]).unwrap().max_abs_diff(x.matrix()) <= 1e-14);
        prop_assert!(partial_trace(&xy, &[da, db], &[1]).unwrap().max_abs_diff(y.matrix()) <= 1e-14);
        let yx = permute_subsystems(&xy, &[da, db], &[1, 0]).unwrap();
        prop_assert!(yx.max_abs_diff(&tensor_product(y.matrix(), x.matrix()).unwrap()) <= 1e-15);
    }

    #[test]
    fn fidelity_matches_reference(s1 in any::<u64>(), s2 in any::<u64>(), n in 1..5usize, r1 in 1..5usize, r2 in 1..5usize) {
        let rho = random_density::<f64>(n, r1.min(n), s1).unwrap();
        let sigma = random_density::<f64>(n, r2.min(n), s2).unwrap();
        let f = fidelity(rho.matrix(), sigma.matrix()).unwrap();
        let reference = common::fidelity(&common::dense(rho.matrix()), &common::dense(sigma.matrix()));
        prop_assert!((f - reference).abs() <= 1e-7, "{f} vs {reference}");
        let g = fidelity(sigma.matrix(), rho.matrix()).unwrap();
        prop_assert!((f - g).abs() <= 1e-7);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        let c = purified_distance(rho.matrix(), sigma.matrix()).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
    }

    #[test]
    fn positive_part_properties(h in hermitian_strategy(8)) {
        let p = positive_part(&h).unwrap();
        let n = p.sub(&h);
        prop_assert!(eigvals(&p).unwrap()[0] >= -1e-12);
        prop_assert!(eigvals(&n).unwrap()[0] >= -1e-12);
        // {H}_+ and {H}_- are orthogonal.
        prop_assert!(p.trace_product(&n).abs() <= 1e-11);
        let t = positive_part_trace(&h).unwrap();
        prop_assert!((t - p.trace()).abs() <= 1e-12);
    }

    #[test]
    fn sqrt_squares_back(seed in any::<u64>(), n in 1..7usize) {
        let rho = random_density::<f64>(n, n, seed).unwrap();
        let r = matrix_function(rho.matrix(), f64::sqrt, false).unwrap();
        let sq = HermitianMatrix::new(r.as_matrix().matmul(r.as_matrix())).unwrap();
        prop_assert!(sq.max_abs_diff(rho.matrix()) <= 1e-13);
        let reference = common::from_dense(&common::func(&common::dense(rho.matrix()), |v| v.max(0.0).sqrt()));
        prop_assert!(r.max_abs_diff(&reference) <= 1e-7);
    }

    #[test]
    fn operator_order(seed in any::<u64>(), n in 1..6usize, shift in 1e-6..1.0f64) {
        let rho = random_density::<f64>(n, n, seed).unwrap();
        let above = rho.matrix().add_identity(shift);
        prop_assert!(operator_geq(&above, rho.matrix(), 0.0).unwrap());
        prop_assert!(!operator_geq(&rho.matrix().add_identity(-shift), rho.matrix(), 0.0).unwrap());
    }
}

#[test]
fn closed_form_values() {
    let p = HermitianMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
    let half = HermitianMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 0.5]]).unwrap();
    assert!((fidelity(&p, &half).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    assert!((fidelity(&p, &p).unwrap() - 1.0).abs() < 1e-12);
    let q = HermitianMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]).unwrap();
    assert!(fidelity(&p, &q).unwrap().abs() < 1e-12);
    assert!((purified_distance(&p, &q).unwrap() - 1.0).abs() < 1e-12);

    let h = HermitianMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -2.0]]).unwrap();
    assert_eq!(
        positive_part(&h)
            .unwrap()
            .max_abs_diff(&HermitianMatrix::diag(&[1.0, 0.0])),
        0.0
    );
    let pauli_x = HermitianMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
    let ev = eigvals(&pauli_x).unwrap();
    assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
}

#[test]
fn shape_errors() {
    let a = HermitianMatrix::identity(4);
    assert!(partial_trace(&a, &[3, 2], &[0]).is_err());
    assert!(partial_trace(&a, &[2, 2], &[2]).is_err());
    assert!(permute_subsystems(&a, &[2, 2], &[0, 0]).is_err());
    assert!(fidelity(&a, &HermitianMatrix::identity(2)).is_err());
    assert!(matrix_function(&HermitianMatrix::diag(&[-1.0, 1.0]), f64::sqrt, false).is_err());
}
