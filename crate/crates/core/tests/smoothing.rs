use proptest::prelude::*;
use qaep::entropy::{h_alpha_rel, h_min_rel};
use qaep::linops::{eigvals, identity_kron};
use qaep::smooth::{
    alpha_smoothing_bound, constructive_hmin_lower, epsilon_of_lambda, lambda_for_epsilon,
    smooth_state, smoothing_penalty,
};
use qaep::state::{embed_classical, random_density_dims};
use qaep::{DensityOperator, Error, HermitianMatrix};

fn state(da: usize, db: usize, rank: usize, seed: u64) -> DensityOperator {
    random_density_dims(vec![da, db], rank.clamp(1, da * db), seed).unwrap()
}

fn full_sigma(db: usize, seed: u64) -> DensityOperator {
    random_density_dims(vec![db], db, seed)
        .unwrap()
        .resplit(0)
        .unwrap()
}

fn top_lambda(rho: &DensityOperator, sigma: &DensityOperator) -> f64 {
    2f64.powf(
        -h_min_rel(rho, sigma)
            .unwrap()
            .expect_finite("full-rank sigma"),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn smoothing_invariants(seed in any::<u64>(), da in 1..4usize, db in 1..4usize, r in 1..10usize, frac in 0.01..1.0f64) {
        let rho = state(da, db, r, seed);
        let sigma = full_sigma(db, seed ^ 1);
        let lambda = top_lambda(&rho, &sigma) * frac;
        let s = smooth_state(&rho, &sigma, lambda).unwrap();
        let big = identity_kron(da, sigma.matrix()).scale(lambda);
        prop_assert!(eigvals(&big.sub(s.smoothed_state.matrix())).unwrap()[0] >= -1e-9);
        prop_assert!(s.purified_distance <= s.epsilon_achieved + 1e-6);
        prop_assert!(s.smoothed_state.trace() <= 1.0 + 1e-12);
        prop_assert!(s.g_norm <= 1.0 + 1e-9);
        prop_assert!(s.hmin_of_smoothed.ge_with_slack(&qaep::EntropyValue::Finite(-lambda.log2()), 1e-6));
        prop_assert!((s.epsilon_achieved - epsilon_of_lambda(&rho, &sigma, lambda).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn epsilon_is_monotone_and_round_trips(seed in any::<u64>(), da in 1..4usize, db in 1..4usize, r in 1..10usize) {
        let rho = state(da, db, r, seed);
        let sigma = full_sigma(db, seed ^ 2);
        let top = top_lambda(&rho, &sigma);
        let grid: Vec<f64> = (0..=40).map(|k| if k == 40 { top } else { top * k as f64 / 40.0 }).collect();
        let eps: Vec<f64> = grid.iter().map(|&l| epsilon_of_lambda(&rho, &sigma, l).unwrap()).collect();
        prop_assert!(eps.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        prop_assert!((eps[0] - 2f64.sqrt()).abs() <= 1e-9);
        prop_assert!(eps[40] <= 1e-7, "eps at top {}", eps[40]);
        for &l in &grid[1..40] {
            let e = epsilon_of_lambda(&rho, &sigma, l).unwrap();
            if e > 1e-6 && e < 2f64.sqrt() - 1e-6 {
                let back = lambda_for_epsilon(&rho, &sigma, e).unwrap();
                prop_assert!((back - l).abs() <= 1e-9 * l.max(1.0), "{l} -> {e} -> {back}");
            }
        }
    }

    #[test]
    fn certified_bound_grows_with_epsilon(seed in any::<u64>(), da in 1..4usize, db in 1..4usize, r in 1..10usize) {
        let rho = state(da, db, r, seed);
        let sigma = full_sigma(db, seed ^ 3);
        let grid = [0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4];
        let values: Vec<f64> =
            grid.iter().map(|&e| constructive_hmin_lower(&rho, &sigma, e).unwrap().expect_finite("full rank")).collect();
        prop_assert!(values.windows(2).all(|w| w[1] >= w[0] - 1e-9));
        let hmin = h_min_rel(&rho, &sigma).unwrap().expect_finite("full rank");
        prop_assert!(values[0] >= hmin - 1e-9);
        // Small ε approaches the unsmoothed value.
        let tiny = constructive_hmin_lower(&rho, &sigma, 1e-7).unwrap().expect_finite("full rank");
        prop_assert!((tiny - hmin).abs() <= 1e-3);
        for (k, &e) in grid.iter().enumerate() {
            for alpha in [1.25, 1.5, 2.0] {
                let rhs = alpha_smoothing_bound(&rho, &sigma, e, alpha).unwrap();
                prop_assert!(rhs.finite().is_none_or(|x| values[k] >= x));
            }
        }
    }
}

#[test]
fn maximally_mixed_closed_form() {
    let rho = DensityOperator::maximally_mixed(vec![2, 2]);
    let sigma = DensityOperator::maximally_mixed(vec![2])
        .resplit(0)
        .unwrap();
    assert!((epsilon_of_lambda(&rho, &sigma, 0.25).unwrap() - 1.0).abs() < 1e-12);
    assert!((lambda_for_epsilon(&rho, &sigma, 1.0).unwrap() - 0.25).abs() < 1e-12);
    assert!(
        (constructive_hmin_lower(&rho, &sigma, 1.0)
            .unwrap()
            .expect_finite("bound")
            - 2.0)
            .abs()
            < 1e-10
    );
    let rhs = alpha_smoothing_bound(&rho, &sigma, 1.0, 2.0)
        .unwrap()
        .expect_finite("rhs");
    assert!(rhs.abs() < 1e-12);
    let h2 = h_alpha_rel(&rho, &sigma, 2.0).unwrap().expect_finite("h2");
    assert!((rhs - (h2 - 1.0)).abs() < 1e-15);
    assert!((smoothing_penalty(1.0f64, 2.0) - 1.0).abs() < 1e-15);
}

#[test]
fn classical_half_coin() {
    let rho = embed_classical(&[0.5f64, 0.5]).unwrap();
    let trivial = rho.marginal_b().unwrap();
    let s = smooth_state(&rho, &trivial, 0.25).unwrap();
    assert!((s.epsilon_achieved - 1.0).abs() < 1e-12);
    assert!(
        s.smoothed_state
            .matrix()
            .max_abs_diff(&HermitianMatrix::diag(&[0.25, 0.25]))
            < 1e-12
    );
    assert!(s.purified_distance <= 1.0 + 1e-12);
    assert!((s.purified_distance - 0.5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn no_smoothing_above_threshold() {
    let rho = state(2, 3, 3, 17);
    let sigma = full_sigma(3, 18);
    let lambda = top_lambda(&rho, &sigma) * 1.5;
    let s = smooth_state(&rho, &sigma, lambda).unwrap();
    assert_eq!(s.epsilon_achieved, 0.0);
    assert!(s.smoothed_state.matrix().max_abs_diff(rho.matrix()) < 1e-9);
}

#[test]
fn support_violation_and_parameters() {
    let rho = state(2, 2, 4, 5);
    let narrow = DensityOperator::new(HermitianMatrix::diag(&[1.0, 0.0]), vec![2])
        .unwrap()
        .resplit(0)
        .unwrap();
    assert!(matches!(
        lambda_for_epsilon(&rho, &narrow, 0.5),
        Err(Error::SupportViolation)
    ));
    assert!(constructive_hmin_lower(&rho, &narrow, 0.5)
        .unwrap()
        .is_neg_infinite());
    let sigma = full_sigma(2, 6);
    assert!(lambda_for_epsilon(&rho, &sigma, 0.0).is_err());
    assert!(lambda_for_epsilon(&rho, &sigma, 1.5).is_err());
    assert!(smooth_state(&rho, &sigma, 0.0).is_err());
    assert!(alpha_smoothing_bound(&rho, &sigma, 0.5, 2.5).is_err());
    assert!(alpha_smoothing_bound(&rho, &sigma, 0.5, 1.0).is_err());
}
