//! Constructive smoothing: for `Λ = λ 1 ⊗ σ` and `Δ = {ρ - Λ}_+`, the state
//! `ρ̃ = G ρ G^dag` with `G = Λ^{1/2} (Λ + Δ)^{-1/2}` satisfies `ρ̃ <= Λ`
//! and lies within purified distance `ε(λ) = sqrt(2 tr Δ)` of `ρ`.

use crate::entropy::{h_alpha_rel, h_min_rel, Divergence, EntropyValue};
use crate::error::{Error, Result};
use crate::linops::{
    eig, eigvals, identity_kron, matrix_function, singular_values, HermitianMatrix,
};
use crate::scalar::{log2, Scalar};
use crate::state::{support_check, DensityOperator};

const EPS_TOL: f64 = 1e-13;
const WIDTH_TOL: f64 = 1e-12;
const ROOT_ITERATIONS: usize = 200;

fn check_support<T: Scalar>(rho: &DensityOperator<T>, sigma: &DensityOperator<T>) -> Result<()> {
    rho.check_conditioning(sigma)?;
    let rho_b = rho.marginal_b()?;
    if support_check(rho_b.matrix(), sigma.matrix())?.violated {
        return Err(Error::SupportViolation);
    }
    Ok(())
}

fn lambda_operator<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    lambda: T,
) -> HermitianMatrix<T> {
    identity_kron(rho.dim_a(), sigma.matrix()).scale(lambda)
}

/// Eigenvalues of `M` at or below `dim * machine_epsilon * max|eig|` are
/// indistinguishable from zero.
fn noise_floor<T: Scalar>(values: &[T]) -> T {
    let scale = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    T::lit(values.len() as f64) * T::epsilon() * scale
}

fn positive_trace<T: Scalar>(m: &HermitianMatrix<T>) -> Result<T> {
    let ev = eigvals(m)?;
    let floor = noise_floor(&ev);
    Ok(ev.into_iter().filter(|v| *v > floor).sum())
}

fn positive_part<T: Scalar>(m: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
    let s = eig(m)?;
    let floor = noise_floor(&s.values);
    Ok(s.reconstruct_with(|v| if v > floor { v } else { T::zero() }))
}

/// `sqrt(2 tr {ρ - λ 1 ⊗ σ}_+)`, with eigenvalues inside the eigensolver's
/// noise floor counted as zero.
pub fn epsilon_of_lambda<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    lambda: T,
) -> Result<T> {
    rho.check_conditioning(sigma)?;
    if !(lambda >= T::zero()) {
        return Err(Error::Parameter(format!(
            "lambda must be non-negative, got {lambda}"
        )));
    }
    let diff = rho.matrix().sub(&lambda_operator(rho, sigma, lambda));
    let tr = positive_trace(&diff)?;
    Ok((T::lit(2.0) * tr.max(T::zero())).sqrt())
}

/// Smallest bracketed `λ` (to tolerance) with `ε(λ) <= ε`.
///
/// The bracket starts at `[0, 2^{-H_min(A|B)_{ρ|σ}}]` and is refined by
/// Illinois-modified regula falsi on `tr Δ(λ) = ε²/2`, falling back to
/// bisection whenever a step fails to halve the bracket. The returned value
/// is the upper end of the final bracket, so `ε(λ) <= ε` always holds.
pub fn lambda_for_epsilon<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    epsilon: T,
) -> Result<T> {
    check_support(rho, sigma)?;
    let ceiling = (T::lit(2.0) * rho.trace()).sqrt();
    if !(epsilon > T::zero() && epsilon < ceiling) {
        return Err(Error::Parameter(format!(
            "epsilon must lie in (0, {ceiling}), got {epsilon}"
        )));
    }
    let h = h_min_rel(rho, sigma)?;
    let Some(h) = h.finite() else {
        return Err(Error::SupportViolation);
    };
    let target = epsilon * epsilon * T::lit(0.5);
    let g = |lam: T| -> Result<T> {
        let e = epsilon_of_lambda(rho, sigma, lam)?;
        Ok(e * e * T::lit(0.5))
    };
    let (mut lo, mut hi) = (T::zero(), T::lit(2.0).powf(-h));
    // Exact residuals at the bracket ends, and the Illinois-weighted copies.
    let (mut r_lo, mut r_hi) = (rho.trace() - target, g(hi)? - target);
    if r_hi > T::zero() {
        // Rounding at the top end: widen until the target is bracketed.
        let mut k = 0;
        while r_hi > T::zero() {
            lo = hi;
            r_lo = r_hi;
            hi *= T::lit(1.0 + 1e-9 * (1u64 << k.min(40)) as f64);
            r_hi = g(hi)? - target;
            k += 1;
            if k > 60 {
                return Err(Error::Contract(
                    "epsilon(lambda) does not reach the target".into(),
                ));
            }
        }
    }
    let (mut w_lo, mut w_hi) = (r_lo, r_hi);
    let eps_tol = T::tol(EPS_TOL);
    let width_tol = T::tol(WIDTH_TOL) * hi.max(T::one());
    let mut side = 0i8;
    for _ in 0..ROOT_ITERATIONS {
        let eps_hi = (T::lit(2.0) * (r_hi + target).max(T::zero())).sqrt();
        if epsilon - eps_hi <= eps_tol || hi - lo <= width_tol {
            return Ok(hi);
        }
        let width = hi - lo;
        let mut mid = (lo * w_hi - hi * w_lo) / (w_hi - w_lo);
        if !(mid > lo && mid < hi) {
            mid = (lo + hi) * T::lit(0.5);
        }
        let r_mid = g(mid)? - target;
        if r_mid > T::zero() {
            lo = mid;
            r_lo = r_mid;
            w_lo = r_mid;
            if side == -1 {
                w_hi *= T::lit(0.5);
            }
            side = -1;
        } else {
            hi = mid;
            r_hi = r_mid;
            w_hi = r_mid;
            if side == 1 {
                w_lo *= T::lit(0.5);
            }
            side = 1;
        }
        if hi - lo > width * T::lit(0.5) {
            // Slow progress: one bisection step.
            let mid = (lo + hi) * T::lit(0.5);
            let r_mid = g(mid)? - target;
            if r_mid > T::zero() {
                lo = mid;
                r_lo = r_mid;
            } else {
                hi = mid;
                r_hi = r_mid;
            }
            w_lo = r_lo;
            w_hi = r_hi;
            side = 0;
        }
    }
    Ok(hi)
}

/// Smoothed state and the quantities certifying it.
#[derive(Clone, Debug)]
pub struct SmoothingResult<T: Scalar> {
    pub lambda: T,
    /// `sqrt(2 tr Δ)`.
    pub epsilon_achieved: T,
    pub smoothed_state: DensityOperator<T>,
    /// `H_min(A|B)_{ρ̃|σ}`.
    pub hmin_of_smoothed: EntropyValue<T>,
    /// Measured `C(ρ, ρ̃)`.
    pub purified_distance: T,
    /// Largest singular value of `G`.
    pub g_norm: T,
}

pub fn smooth_state<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    lambda: T,
) -> Result<SmoothingResult<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::Parameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    check_support(rho, sigma)?;
    let big_lambda = lambda_operator(rho, sigma, lambda);
    let delta = positive_part(&rho.matrix().sub(&big_lambda))?;
    let epsilon_achieved = (T::lit(2.0) * delta.trace().max(T::zero())).sqrt();
    let root = matrix_function(&big_lambda, |v| v.sqrt(), true)?;
    let inv_root = matrix_function(&big_lambda.add(&delta), |v| T::one() / v.sqrt(), true)?;
    let g = root.as_matrix().matmul(inv_root.as_matrix());
    let g_norm = singular_values(&g)?.first().copied().unwrap_or(T::zero());
    let smoothed = rho.matrix().conjugate_by(&g);
    let smoothed_state =
        DensityOperator::from_parts_unchecked(smoothed, rho.dims().to_vec(), rho.split());
    let hmin_of_smoothed = h_min_rel(&smoothed_state, sigma)?;
    let purified_distance = rho.purified_distance(&smoothed_state)?;
    Ok(SmoothingResult {
        lambda,
        epsilon_achieved,
        smoothed_state,
        hmin_of_smoothed,
        purified_distance,
        g_norm,
    })
}

/// `-log λ(ε)`, a certified lower bound on the ε-smooth min-entropy of `ρ`
/// relative to `σ`; `-inf` under a support violation.
pub fn constructive_hmin_lower<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    epsilon: T,
) -> Result<EntropyValue<T>> {
    match lambda_for_epsilon(rho, sigma, epsilon) {
        Ok(lambda) => Ok(EntropyValue::Finite(-log2(lambda))),
        Err(Error::SupportViolation) => {
            let check = support_check(rho.marginal_b()?.matrix(), sigma.matrix())?;
            Ok(EntropyValue::NegInfinity(Divergence::SupportViolation {
                leakage: check.leakage,
                cutoff_sensitive: check.cutoff_sensitive,
            }))
        }
        Err(e) => Err(e),
    }
}

/// `H_α(A|B)_{ρ|σ} - log(2/ε²) / (α - 1)` for `α ∈ (1, 2]`.
pub fn alpha_smoothing_bound<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    epsilon: T,
    alpha: T,
) -> Result<EntropyValue<T>> {
    if !(alpha > T::one() && alpha <= T::lit(2.0)) {
        return Err(Error::Parameter(format!(
            "alpha must lie in (1, 2], got {alpha}"
        )));
    }
    if !(epsilon > T::zero()) {
        return Err(Error::Parameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let h = h_alpha_rel(rho, sigma, alpha)?;
    Ok(h.add(-smoothing_penalty(epsilon, alpha)))
}

/// `log(2/ε²) / (α - 1)`.
pub fn smoothing_penalty<T: Scalar>(epsilon: T, alpha: T) -> T {
    log2(T::lit(2.0) / (epsilon * epsilon)) / (alpha - T::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quarter() -> (DensityOperator<f64>, DensityOperator<f64>) {
        let rho = DensityOperator::maximally_mixed(vec![2, 2]);
        let sigma =
            DensityOperator::with_split(HermitianMatrix::diag(&[0.5, 0.5]), vec![2], 0).unwrap();
        (rho, sigma)
    }

    #[test]
    fn epsilon_hand_values() {
        let (rho, sigma) = quarter();
        assert!((epsilon_of_lambda(&rho, &sigma, 0.0).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!((epsilon_of_lambda(&rho, &sigma, 0.25).unwrap() - 1.0).abs() < 1e-12);
        assert!(epsilon_of_lambda(&rho, &sigma, 0.5).unwrap().abs() < 1e-12);
    }

    #[test]
    fn lambda_round_trip_on_mixed_state() {
        let (rho, sigma) = quarter();
        let lam = lambda_for_epsilon(&rho, &sigma, 1.0).unwrap();
        assert!((lam - 0.25).abs() < 1e-9);
        let lower = constructive_hmin_lower(&rho, &sigma, 1.0)
            .unwrap()
            .expect_finite("bound");
        assert!((lower - 2.0).abs() < 1e-8);
        let rhs = alpha_smoothing_bound(&rho, &sigma, 1.0, 2.0)
            .unwrap()
            .expect_finite("rhs");
        assert!(rhs.abs() < 1e-12);
    }

    #[test]
    fn support_violation_reports() {
        let rho = DensityOperator::<f64>::maximally_mixed(vec![2, 2]);
        let sigma =
            DensityOperator::with_split(HermitianMatrix::diag(&[1.0, 0.0]), vec![2], 0).unwrap();
        assert!(matches!(
            lambda_for_epsilon(&rho, &sigma, 0.5),
            Err(Error::SupportViolation)
        ));
        assert!(constructive_hmin_lower(&rho, &sigma, 0.5)
            .unwrap()
            .is_neg_infinite());
        assert!(matches!(
            smooth_state(&rho, &sigma, 0.3),
            Err(Error::SupportViolation)
        ));
    }

    #[test]
    fn no_smoothing_needed_above_threshold() {
        let (rho, sigma) = quarter();
        let r = smooth_state(&rho, &sigma, 0.5).unwrap();
        assert!(r.epsilon_achieved < 1e-12);
        assert!(r.smoothed_state.matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn alpha_window_enforced() {
        let (rho, sigma) = quarter();
        assert!(alpha_smoothing_bound(&rho, &sigma, 0.5, 1.0).is_err());
        assert!(alpha_smoothing_bound(&rho, &sigma, 0.5, 2.5).is_err());
    }
}
