//! Finite-n equipartition bounds.
//!
//! For `n` copies of `ρ_AB` the per-copy smooth min-entropy is at least
//! `H(A|B) - δ(ε, η)/√n` with `δ = 4 log η √(log(2/ε²))` once
//! `n >= (8/5) log(2/ε²)`. The chain behind it runs through the α-entropy
//! smoothing bound at `α = 1 + 1/(2μ√n)` and the lower bound
//! `H_α >= H - 4(α - 1)(log η)²`; [`verify_finite_n`] replays that chain on
//! explicit tensor powers.

use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{h_vn_cond, h_vn_rel, upsilon, ConditionalSpectra, Divergence, EntropyValue};
use crate::error::{Error, Result};
use crate::linops::DEFAULT_DIM_CAP;
use crate::scalar::{log2, Scalar};
use crate::smooth::{constructive_hmin_lower, smooth_state, smoothing_penalty};
use crate::state::{tensor_power, tensor_power_capped, DensityOperator};

/// `log(2/ε²)` for `ε ∈ (0, √2)`.
pub fn smoothing_log<T: Scalar>(epsilon: T) -> Result<T> {
    if !(epsilon > T::zero() && epsilon < T::SQRT_2()) {
        return Err(Error::Parameter(format!(
            "epsilon must lie in (0, sqrt 2), got {epsilon}"
        )));
    }
    Ok(log2(T::lit(2.0) / (epsilon * epsilon)))
}

fn log_eta<T: Scalar>(eta: T) -> Result<T> {
    if !(eta > T::one()) || eta.is_infinite() {
        return Err(Error::Contract(format!(
            "eta must be finite and exceed 1, got {eta}"
        )));
    }
    Ok(log2(eta))
}

/// `(δ(ε, η), n_min)` with `δ = 4 log η √(log(2/ε²))` and
/// `n_min = (8/5) log(2/ε²)`.
pub fn delta_error<T: Scalar>(epsilon: T, eta: T) -> Result<(T, T)> {
    let l = smoothing_log(epsilon)?;
    let le = log_eta(eta)?;
    Ok((T::lit(4.0) * le * l.sqrt(), T::lit(1.6) * l))
}

/// `μ* = √((log η)² / log(2/ε²))`, the minimizer of [`mu_objective`].
pub fn mu_star<T: Scalar>(epsilon: T, eta: T) -> Result<T> {
    let l = smoothing_log(epsilon)?;
    let le = log_eta(eta)?;
    Ok((le * le / l).sqrt())
}

/// `μ log(2/ε²) + (log η)² / μ`; equals `δ/2` at `μ*`.
pub fn mu_objective<T: Scalar>(mu: T, epsilon: T, eta: T) -> Result<T> {
    let l = smoothing_log(epsilon)?;
    let le = log_eta(eta)?;
    Ok(mu * l + le * le / mu)
}

/// Open interval `(1, 1 + log 3 / (4 log η))` of admissible α.
pub fn alpha_window<T: Scalar>(eta: T) -> Result<(T, T)> {
    let le = log_eta(eta)?;
    Ok((T::one(), T::one() + log2(T::lit(3.0)) / (T::lit(4.0) * le)))
}

/// `H - 4(α - 1)(log η)²` together with the η and window it was checked against.
#[derive(Clone, Copy, Debug)]
pub struct AlphaLowerBound<T: Scalar> {
    pub value: EntropyValue<T>,
    pub eta: EntropyValue<T>,
    pub window: (T, T),
}

/// Lower bound on `H_α(A|B)_{ρ|σ}` for α in the window set by `η = Υ(ρ, σ)`.
/// Under a support violation both sides are `-inf` and no window applies.
pub fn alpha_lower_bound<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    alpha: T,
) -> Result<AlphaLowerBound<T>> {
    let spectra = ConditionalSpectra::new(rho, sigma)?;
    let ups = spectra.upsilon()?;
    let h = spectra.h_vn();
    let eta = match ups.eta {
        EntropyValue::Finite(eta) if h.is_finite() => eta,
        _ => {
            return Ok(AlphaLowerBound {
                value: if h.is_neg_infinite() {
                    h
                } else {
                    EntropyValue::NegInfinity(Divergence::Propagated)
                },
                eta: ups.eta,
                window: (T::one(), T::one()),
            })
        }
    };
    let window = alpha_window(eta)?;
    if !(alpha > window.0 && alpha < window.1) {
        return Err(Error::Window {
            alpha: alpha.to_f64_lossy(),
            lower: window.0.to_f64_lossy(),
            upper: window.1.to_f64_lossy(),
        });
    }
    let le = log2(eta);
    let value = h.add(-T::lit(4.0) * (alpha - T::one()) * le * le);
    Ok(AlphaLowerBound {
        value,
        eta: ups.eta,
        window,
    })
}

/// One `(n, ε)` entry of the finite-n bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AepBoundRow<T: Scalar> {
    pub n: usize,
    pub epsilon: T,
    /// `+inf` when `H_{3/2}` diverges.
    pub eta: T,
    pub h_vn: T,
    /// `h_vn - gap`; `-inf` when η or `h_vn` diverges.
    pub bound: T,
    /// `δ(ε, η)/√n`.
    pub gap: T,
    /// `n >= n_min`.
    pub valid: bool,
}

impl<T: Scalar> AepBoundRow<T> {
    pub const CSV_HEADER: &'static str = "n,epsilon,eta,h_vn,bound,gap,valid";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            csv_num(self.epsilon),
            csv_num(self.eta),
            csv_num(self.h_vn),
            csv_num(self.bound),
            csv_num(self.gap),
            self.valid
        )
    }
}

fn csv_num<T: Scalar>(x: T) -> String {
    let v = x.to_f64_lossy();
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:e}")
    }
}

/// Bound relative to the marginal `ρ_B`.
pub fn qep_bound<T: Scalar>(
    rho: &DensityOperator<T>,
    epsilon: T,
    n: usize,
) -> Result<AepBoundRow<T>> {
    let rho_b = rho.marginal_b()?;
    qep_bound_rel(rho, &rho_b, epsilon, n)
}

/// Bound with an arbitrary conditioning state, `η = Υ(ρ, σ)` and
/// `H = H(A|B)_{ρ|σ}`.
pub fn qep_bound_rel<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    epsilon: T,
    n: usize,
) -> Result<AepBoundRow<T>> {
    if n == 0 {
        return Err(Error::Parameter("n must be positive".into()));
    }
    if !rho.normalized() {
        return Err(Error::NotAState(
            "the finite-n bound needs a normalized state".into(),
        ));
    }
    let l = smoothing_log(epsilon)?;
    let n_min = T::lit(1.6) * l;
    let valid = T::lit(n as f64) >= n_min;
    let h = h_vn_rel(rho, sigma)?;
    let eta = upsilon(rho, sigma)?.eta;
    match (h, eta) {
        (EntropyValue::Finite(h_vn), EntropyValue::Finite(eta)) => {
            let (delta, _) = delta_error(epsilon, eta)?;
            let gap = delta / T::lit(n as f64).sqrt();
            Ok(AepBoundRow {
                n,
                epsilon,
                eta,
                h_vn,
                bound: h_vn - gap,
                gap,
                valid,
            })
        }
        (h, eta) => Ok(AepBoundRow {
            n,
            epsilon,
            eta: eta.finite().unwrap_or(T::infinity()),
            h_vn: h.finite().unwrap_or(T::neg_infinity()),
            bound: T::neg_infinity(),
            gap: T::infinity(),
            valid,
        }),
    }
}

/// Bound rows for every `(ε, n)` pair, sorted by ε then n, duplicates removed.
pub fn convergence_table<T: Scalar>(
    rho: &DensityOperator<T>,
    eps_list: &[T],
    n_list: &[usize],
) -> Result<Vec<AepBoundRow<T>>> {
    let rho_b = rho.marginal_b()?;
    let h = h_vn_cond(rho)?;
    let ups = upsilon(rho, &rho_b)?;
    let mut eps: Vec<T> = eps_list.to_vec();
    eps.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    eps.dedup();
    let mut ns: Vec<usize> = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut rows = Vec::with_capacity(eps.len() * ns.len());
    for &e in &eps {
        let l = smoothing_log(e)?;
        for &n in &ns {
            if n == 0 {
                return Err(Error::Parameter("n must be positive".into()));
            }
            let valid = T::lit(n as f64) >= T::lit(1.6) * l;
            let row = match ups.eta {
                EntropyValue::Finite(eta) => {
                    let (delta, _) = delta_error(e, eta)?;
                    let gap = delta / T::lit(n as f64).sqrt();
                    AepBoundRow {
                        n,
                        epsilon: e,
                        eta,
                        h_vn: h,
                        bound: h - gap,
                        gap,
                        valid,
                    }
                }
                _ => AepBoundRow {
                    n,
                    epsilon: e,
                    eta: T::infinity(),
                    h_vn: h,
                    bound: T::neg_infinity(),
                    gap: T::infinity(),
                    valid,
                },
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

/// How μ was chosen for the chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MuBranch {
    /// `n >= n_min`: `μ = μ*`.
    Optimal,
    /// `n < n_min`: μ just above the smallest value keeping α in the window.
    WindowEdge,
}

/// Checks on the smoothing witness built from the certified λ.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WitnessCheck<T: Scalar> {
    pub lambda: T,
    pub epsilon_achieved: T,
    pub purified_distance: T,
    /// `H_min(ρ̃|σ) + log λ`, which must be non-negative up to slack.
    pub hmin_margin: T,
    pub trace: T,
    pub g_norm: T,
    pub ok: bool,
}

/// Outcome of replaying the finite-n chain on explicit tensor powers.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteNReport<T: Scalar> {
    pub n: usize,
    pub epsilon: T,
    pub mu: T,
    pub alpha: T,
    pub branch: MuBranch,
    pub row: AepBoundRow<T>,
    /// `H_α(ρ|σ)` for one copy.
    pub h_alpha_single: T,
    /// `H_α(ρ^⊗n|σ^⊗n)`.
    pub h_alpha_power: T,
    /// `|H_α(ρ^⊗n|σ^⊗n) - n H_α(ρ|σ)|`.
    pub additivity_error: T,
    pub additivity_ok: bool,
    /// `H_α >= H - 4(α - 1)(log η)²` for one copy.
    pub alpha_bound_ok: bool,
    /// `(1/n) (-log λ(ε))` on `ρ^⊗n`.
    pub per_copy_lower: T,
    /// `(1/n) (H_α(ρ^⊗n) - log(2/ε²)/(α - 1))`.
    pub per_copy_rhs: T,
    pub smoothing_ok: bool,
    /// `per_copy_lower >= bound - 1e-6`; `None` below `n_min`.
    pub bound_ok: Option<bool>,
    /// Skipped above [`FiniteNConfig::witness_dim_cap`].
    pub witness: Option<WitnessCheck<T>>,
}

impl<T: Scalar> FiniteNReport<T> {
    pub fn passed(&self) -> bool {
        self.additivity_ok
            && self.alpha_bound_ok
            && self.smoothing_ok
            && self.bound_ok.unwrap_or(true)
            && self.witness.is_none_or(|w| w.ok)
    }

    /// `per_copy_lower - H(A|B)_{ρ|σ}`.
    pub fn upper_excess(&self) -> T {
        self.per_copy_lower - self.row.h_vn
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FiniteNConfig {
    pub dim_cap: usize,
    /// Largest `ρ^⊗n` dimension for which the smoothing witness is built.
    pub witness_dim_cap: usize,
    /// Per-copy slack on additivity (scaled by n) and the smoothing chain.
    pub equality_tol: f64,
    /// Slack on the final bound.
    pub bound_tol: f64,
}

impl Default for FiniteNConfig {
    fn default() -> Self {
        Self {
            dim_cap: DEFAULT_DIM_CAP,
            witness_dim_cap: 256,
            equality_tol: 1e-7,
            bound_tol: 1e-6,
        }
    }
}

pub fn verify_finite_n<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    epsilon: T,
    n: usize,
) -> Result<FiniteNReport<T>> {
    verify_finite_n_with(rho, sigma, epsilon, n, &FiniteNConfig::default())
}

pub fn verify_finite_n_with<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    epsilon: T,
    n: usize,
    config: &FiniteNConfig,
) -> Result<FiniteNReport<T>> {
    rho.check_conditioning(sigma)?;
    let rho_n = tensor_power_capped(rho, n, config.dim_cap)?;
    let sigma_n = tensor_power(sigma, n)?;
    let row = qep_bound_rel(rho, sigma, epsilon, n)?;
    if !row.bound.is_finite() {
        return Err(Error::SupportViolation);
    }
    let nf = T::lit(n as f64);
    let eta = row.eta;
    let le = log2(eta);
    let star = mu_star(epsilon, eta)?;
    let edge = T::lit(2.0) * le / (nf.sqrt() * log2(T::lit(3.0))) * T::lit(1.0 + 1e-9);
    let (mu, branch) = if row.valid && star >= edge {
        (star, MuBranch::Optimal)
    } else {
        (edge.max(star), MuBranch::WindowEdge)
    };
    let alpha = T::one() + T::one() / (T::lit(2.0) * mu * nf.sqrt());
    let eq_tol = T::tol(config.equality_tol);

    let single = ConditionalSpectra::new(rho, sigma)?;
    let h_alpha_single = single.h_alpha(alpha)?.expect_finite("single-copy H_alpha");
    let power = ConditionalSpectra::new(&rho_n, &sigma_n)?;
    let h_alpha_power = power.h_alpha(alpha)?.expect_finite("tensor-power H_alpha");
    let additivity_error = (h_alpha_power - nf * h_alpha_single).abs();
    let additivity_ok = additivity_error <= eq_tol * nf;

    let alpha_floor = row.h_vn - T::lit(4.0) * (alpha - T::one()) * le * le;
    let alpha_bound_ok = h_alpha_single >= alpha_floor - eq_tol;

    let lower =
        constructive_hmin_lower(&rho_n, &sigma_n, epsilon)?.expect_finite("constructive bound");
    let per_copy_lower = lower / nf;
    let per_copy_rhs = (h_alpha_power - smoothing_penalty(epsilon, alpha)) / nf;
    let smoothing_ok = per_copy_lower >= per_copy_rhs - eq_tol;
    let bound_ok = row
        .valid
        .then(|| per_copy_lower >= row.bound - T::tol(config.bound_tol));

    let witness = if rho_n.dim() <= config.witness_dim_cap {
        let lambda = T::lit(2.0).powf(-lower);
        let r = smooth_state(&rho_n, &sigma_n, lambda)?;
        let hmin_margin = r.hmin_of_smoothed.add(log2(lambda));
        let hmin_margin = match hmin_margin {
            EntropyValue::PosInfinity(_) => T::infinity(),
            v => v.finite().unwrap_or(T::neg_infinity()),
        };
        let slack = T::tol(1e-6);
        let trace = r.smoothed_state.trace();
        let ok = r.purified_distance <= epsilon + slack
            && hmin_margin >= -slack
            && trace <= T::one() + T::tol(T::TRACE_TOLERANCE)
            && r.g_norm <= T::one() + T::tol(1e-9);
        Some(WitnessCheck {
            lambda,
            epsilon_achieved: r.epsilon_achieved,
            purified_distance: r.purified_distance,
            hmin_margin,
            trace,
            g_norm: r.g_norm,
            ok,
        })
    } else {
        None
    };

    Ok(FiniteNReport {
        n,
        epsilon,
        mu,
        alpha,
        branch,
        row,
        h_alpha_single,
        h_alpha_power,
        additivity_error,
        additivity_ok,
        alpha_bound_ok,
        per_copy_lower,
        per_copy_rhs,
        smoothing_ok,
        bound_ok,
        witness,
    })
}

/// [`verify_finite_n_with`] over every `(ε, n)` cell, in parallel; results
/// are ordered by ε then n.
pub fn verify_finite_n_grid<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    eps_list: &[T],
    n_list: &[usize],
    config: &FiniteNConfig,
) -> Result<Vec<FiniteNReport<T>>> {
    let cells: Vec<(T, usize)> = eps_list
        .iter()
        .flat_map(|&e| n_list.iter().map(move |&n| (e, n)))
        .collect();
    let mut out: Vec<FiniteNReport<T>> = cells
        .par_iter()
        .map(|&(e, n)| verify_finite_n_with(rho, sigma, e, n, config))
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| {
        a.epsilon
            .partial_cmp(&b.epsilon)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.n.cmp(&b.n))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::HermitianMatrix;

    const ETA_QUARTER: f64 = 3.121_320_343_559_643; // sqrt(1/2) + sqrt(2) + 1

    #[test]
    fn delta_and_mu_values() {
        let eps = 1.0 / (2.0 * 2f64.sqrt());
        let (d, n_min) = delta_error(eps, 4.0).unwrap();
        assert!((d - 16.0).abs() < 1e-12);
        assert!((n_min - 6.4).abs() < 1e-12);
        assert!((mu_star(eps, 4.0).unwrap() - 1.0).abs() < 1e-12);
        let (d1, n1) = delta_error(1.0, 5.0).unwrap();
        assert!((d1 - 4.0 * 5f64.log2()).abs() < 1e-12);
        assert!((n1 - 1.6).abs() < 1e-12);
        assert!(delta_error(1.0, 1.0).is_err());
        let star: f64 = mu_star(0.3, 7.0).unwrap();
        let obj = mu_objective(star, 0.3, 7.0).unwrap();
        assert!((obj - delta_error(0.3, 7.0).unwrap().0 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_bound_on_mixed_state() {
        let rho = DensityOperator::maximally_mixed(vec![2, 2]);
        let sigma =
            DensityOperator::with_split(HermitianMatrix::diag(&[0.5, 0.5]), vec![2], 0).unwrap();
        let b = alpha_lower_bound(&rho, &sigma, 1.1).unwrap();
        let le = ETA_QUARTER.log2();
        assert!((b.value.expect_finite("bound") - (1.0 - 0.4 * le * le)).abs() < 1e-10);
        assert!((b.window.1 - (1.0 + 3f64.log2() / (4.0 * le))).abs() < 1e-10);
        assert!(matches!(
            alpha_lower_bound(&rho, &sigma, 1.3),
            Err(Error::Window { .. })
        ));
    }

    #[test]
    fn bound_row_on_mixed_state() {
        let rho = DensityOperator::maximally_mixed(vec![2, 2]);
        let row = qep_bound(&rho, 1.0, 16).unwrap();
        assert!((row.eta - ETA_QUARTER).abs() < 1e-10);
        assert!((row.bound - (1.0 - ETA_QUARTER.log2())).abs() < 1e-10);
        assert!(row.valid);
    }

    #[test]
    fn csv_line_format() {
        let row = AepBoundRow {
            n: 2,
            epsilon: 0.5,
            eta: 3.0,
            h_vn: 1.0,
            bound: f64::NEG_INFINITY,
            gap: 0.25,
            valid: true,
        };
        assert_eq!(row.csv_line(), "2,5e-1,3e0,1e0,-inf,2.5e-1,true");
    }
}
