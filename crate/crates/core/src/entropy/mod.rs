//! Conditional entropies: von Neumann, min/max, and the α family.
//!
//! Relative entropies take `rho_AB` and a conditioning state `sigma_B` on
//! the B factors of `rho` (see [`DensityOperator::split`]). All values are
//! in bits.

mod sdp;
mod spectral;
mod value;

pub use sdp::{solve_hmin, HminSolution};
pub use spectral::{ConditionalSpectra, Upsilon};
pub use value::{Divergence, EntropyValue};

use crate::error::{Error, Result};
use crate::linops::{
    eigvals, matrix_function, partial_trace, sandwich_trailing, support_rank, svd, HermitianMatrix,
    Matrix,
};
use crate::scalar::{log2, Scalar};
use crate::state::{purify_compact, support_check, DensityOperator};

pub fn h_vn_rel<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
) -> Result<EntropyValue<T>> {
    Ok(ConditionalSpectra::new(rho, sigma)?.h_vn())
}

/// `H(A|B)_rho = H(A|B)_{rho|rho_B}`.
pub fn h_vn_cond<T: Scalar>(rho: &DensityOperator<T>) -> Result<T> {
    let rho_b = rho.marginal_b()?;
    let v = h_vn_rel(rho, &rho_b)?;
    v.finite()
        .ok_or_else(|| Error::Contract(format!("H(A|B) relative to the own marginal is {v}")))
}

/// Unconditional `H(rho) = -tr rho log rho`.
pub fn von_neumann<T: Scalar>(rho: &HermitianMatrix<T>) -> Result<T> {
    let ev = eigvals(rho)?;
    let cut = crate::linops::support_threshold(&ev, T::lit(T::SUPPORT_CUTOFF));
    Ok(ev
        .iter()
        .filter(|v| **v > cut && **v > T::zero())
        .map(|v| -*v * log2(*v))
        .sum())
}

/// `H_α(A|B)_{rho|sigma}` for `α ∈ (0, 1) ∪ (1, ∞)`.
pub fn h_alpha_rel<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    alpha: T,
) -> Result<EntropyValue<T>> {
    spectral::check_alpha(alpha)?;
    ConditionalSpectra::new(rho, sigma)?.h_alpha(alpha)
}

pub fn h_inf_rel<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
) -> Result<EntropyValue<T>> {
    Ok(ConditionalSpectra::new(rho, sigma)?.h_inf())
}

pub fn h_zero_rel<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
) -> Result<EntropyValue<T>> {
    Ok(ConditionalSpectra::new(rho, sigma)?.h_zero())
}

pub fn upsilon<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
) -> Result<Upsilon<T>> {
    ConditionalSpectra::new(rho, sigma)?.upsilon()
}

/// `-log λ_max((1 ⊗ sigma)^{-1/2} rho (1 ⊗ sigma)^{-1/2})` on the support of
/// `1 ⊗ sigma`; `-inf` if `supp(rho_B) ⊄ supp(sigma)`.
pub fn h_min_rel<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
) -> Result<EntropyValue<T>> {
    rho.check_conditioning(sigma)?;
    hmin_core(rho.matrix(), rho.dim_a(), sigma.matrix())
}

fn hmin_core<T: Scalar>(
    rho: &HermitianMatrix<T>,
    da: usize,
    sigma: &HermitianMatrix<T>,
) -> Result<EntropyValue<T>> {
    let db = sigma.dim();
    let rho_b = if da == 1 {
        rho.clone()
    } else {
        partial_trace(rho, &[da, db], &[1])?
    };
    let check = support_check(&rho_b, sigma)?;
    if check.violated {
        return Ok(EntropyValue::NegInfinity(Divergence::SupportViolation {
            leakage: check.leakage,
            cutoff_sensitive: check.cutoff_sensitive,
        }));
    }
    let inv_sqrt = matrix_function(sigma, |v| T::one() / v.sqrt(), true)?;
    let sandwiched = sandwich_trailing(rho, &inv_sqrt)?;
    let top = *eigvals(&sandwiched)?.last().expect("non-empty");
    if top > T::zero() {
        Ok(EntropyValue::Finite(-log2(top)))
    } else {
        Ok(EntropyValue::PosInfinity(Divergence::NoOverlap))
    }
}

/// `D_max(rho || sigma) = min { λ : rho <= 2^λ sigma }`.
pub fn d_max<T: Scalar>(
    rho: &HermitianMatrix<T>,
    sigma: &HermitianMatrix<T>,
) -> Result<EntropyValue<T>> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Shape(format!(
            "D_max on dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(hmin_core(rho, 1, sigma)?.neg())
}

/// `max_sigma H_min(A|B)_{rho|sigma}`.
pub fn h_min<T: Scalar>(rho: &DensityOperator<T>) -> Result<T> {
    Ok(solve_hmin(rho)?.value)
}

/// `-H_min(A|C)` of a purification `rho_ABC`.
pub fn h_max<T: Scalar>(rho: &DensityOperator<T>) -> Result<T> {
    Ok(-h_min(&complementary(rho)?)?)
}

/// `rho_AC` of the spectral purification of `rho_AB`, cut as A|C.
pub fn complementary<T: Scalar>(rho: &DensityOperator<T>) -> Result<DensityOperator<T>> {
    let pure = purify_compact(rho)?;
    let n = pure.dims().len();
    let mut keep: Vec<usize> = (0..rho.split()).collect();
    keep.push(n - 1);
    pure.marginal(&keep)?.resplit(rho.split())
}

const DIRECT_CAP: usize = 10_000;
const DIRECT_REL_TOL: f64 = 1e-13;

/// Fidelity maximizer for `H_max = max_tau log F^2(rho, 1 ⊗ tau)`.
#[derive(Clone, Debug)]
pub struct HmaxDirect<T: Scalar> {
    pub value: T,
    pub tau: HermitianMatrix<T>,
    pub iterations: usize,
}

/// Alternating maximization of `Re tr(U sqrt(rho) (1 ⊗ S))` over unitaries
/// `U` (polar step) and `S >= 0`, `||S||_F = 1` (projection step), with
/// `tau = S^2`. Each half-step is an exact maximization, so the fidelity
/// increases monotonically.
pub fn h_max_direct<T: Scalar>(rho: &DensityOperator<T>) -> Result<HmaxDirect<T>> {
    let da = rho.dim_a();
    let db = rho.dim_b();
    let root = matrix_function(rho.matrix(), |v| v.sqrt(), false)?;
    let mut s = HermitianMatrix::<T>::identity(db).scale(T::one() / T::lit(db as f64).sqrt());
    let mut f_prev = T::zero();
    let tol = T::tol(DIRECT_REL_TOL);
    for it in 1..=DIRECT_CAP {
        let m = sandwich_right(&root, &s);
        let dec = svd(&m)?;
        let f = dec.nuclear_norm();
        let u = dec.v.matmul(&dec.u.adjoint());
        let um = u.matmul(root.as_matrix());
        let k = partial_trace_a(&um, da, db);
        let herm = HermitianMatrix::symmetrized(k);
        let pos = crate::linops::positive_part(&herm)?;
        let norm = pos.as_matrix().frobenius_norm();
        if !(norm > T::zero()) {
            return Err(Error::OptimizerNoConvergence {
                message: "vanishing ascent direction".into(),
                best_bound: (T::lit(2.0) * log2(f)).to_f64_lossy(),
            });
        }
        s = pos.scale(T::one() / norm);
        if it > 1 && (f - f_prev).abs() <= tol * f {
            let tau = HermitianMatrix::symmetrized(s.as_matrix().matmul(s.as_matrix()));
            let f_final = crate::linops::singular_values(&sandwich_right(&root, &s))?
                .into_iter()
                .sum::<T>();
            return Ok(HmaxDirect {
                value: T::lit(2.0) * log2(f_final.max(f)),
                tau,
                iterations: it,
            });
        }
        f_prev = f;
    }
    Err(Error::OptimizerNoConvergence {
        message: format!("fidelity ascent did not settle in {DIRECT_CAP} iterations"),
        best_bound: (T::lit(2.0) * log2(f_prev)).to_f64_lossy(),
    })
}

/// `M (1 ⊗ S)`.
fn sandwich_right<T: Scalar>(m: &HermitianMatrix<T>, s: &HermitianMatrix<T>) -> Matrix<T> {
    let da = m.dim() / s.dim();
    m.as_matrix()
        .matmul(&Matrix::identity(da).kron(s.as_matrix()))
}

/// `tr_A` of a general (not necessarily Hermitian) operator on `A ⊗ B`.
fn partial_trace_a<T: Scalar>(m: &Matrix<T>, da: usize, db: usize) -> Matrix<T> {
    Matrix::from_fn(db, db, |i, j| {
        (0..da).map(|a| m[(a * db + i, a * db + j)]).sum()
    })
}

/// Rank of `rho` above the support cutoff.
pub fn rank<T: Scalar>(rho: &HermitianMatrix<T>) -> Result<usize> {
    Ok(support_rank(&eigvals(rho)?))
}
