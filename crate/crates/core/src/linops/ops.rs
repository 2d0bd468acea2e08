use num_traits::Zero;

use super::eigen::{eig, eigvals, Spectrum};
use super::matrix::{HermitianMatrix, Matrix};
use super::svd::singular_values;
use crate::error::{Error, Result};
use crate::scalar::{Scalar, C};

/// Largest total dimension any tensor product may reach.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Absolute threshold below which eigenvalues of a PSD spectrum count as zero.
pub fn support_threshold<T: Scalar>(values: &[T], relative: T) -> T {
    let top = values.iter().fold(T::zero(), |m, v| m.max(*v));
    top * relative
}

fn default_cutoff<T: Scalar>() -> T {
    T::lit(T::SUPPORT_CUTOFF)
}

/// PSD admission: `min_eig >= -PSD_TOLERANCE * scale`, with the scale the
/// trace (or the spectral radius when that is larger).
pub(crate) fn check_psd<T: Scalar>(values: &[T]) -> std::result::Result<(), T> {
    let trace: T = values.iter().copied().sum();
    let top = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let scale = trace.max(top);
    let min = values.iter().fold(T::infinity(), |m, v| m.min(*v));
    if min < -T::lit(T::PSD_TOLERANCE) * scale {
        Err(min)
    } else {
        Ok(())
    }
}

/// `f` applied to a PSD matrix through its spectrum.
///
/// With `on_support`, eigenvalues at or below the relative support cutoff map
/// to zero and `f` is never evaluated there. Otherwise every eigenvalue
/// (small negatives clamped to zero) is passed to `f`, and a non-finite
/// result is a domain error.
pub fn matrix_function<T: Scalar>(
    m: &HermitianMatrix<T>,
    f: impl Fn(T) -> T,
    on_support: bool,
) -> Result<HermitianMatrix<T>> {
    let s = eig(m)?;
    spectral_function(&s, f, on_support)
}

/// As [`matrix_function`], reusing a precomputed spectrum.
pub fn spectral_function<T: Scalar>(
    s: &Spectrum<T>,
    f: impl Fn(T) -> T,
    on_support: bool,
) -> Result<HermitianMatrix<T>> {
    if let Err(min) = check_psd(&s.values) {
        return Err(Error::Domain {
            eigenvalue: min.to_f64_lossy(),
        });
    }
    let cut = support_threshold(&s.values, default_cutoff());
    let mut mapped = Vec::with_capacity(s.dim());
    for &v in &s.values {
        let v = v.max(T::zero());
        if on_support && v <= cut {
            mapped.push(T::zero());
            continue;
        }
        let fv = f(v);
        if !fv.is_finite() {
            return Err(Error::Domain {
                eigenvalue: v.to_f64_lossy(),
            });
        }
        mapped.push(fv);
    }
    Ok(HermitianMatrix::from_spectral(&mapped, &s.vectors))
}

/// `f` applied to an arbitrary Hermitian matrix (no positivity assumed).
pub fn hermitian_function<T: Scalar>(
    m: &HermitianMatrix<T>,
    f: impl Fn(T) -> T,
) -> Result<HermitianMatrix<T>> {
    let s = eig(m)?;
    let mapped: Vec<T> = s.values.iter().map(|v| f(*v)).collect();
    if let Some(bad) = s.values.iter().zip(&mapped).find(|(_, fv)| !fv.is_finite()) {
        return Err(Error::Domain {
            eigenvalue: bad.0.to_f64_lossy(),
        });
    }
    Ok(HermitianMatrix::from_spectral(&mapped, &s.vectors))
}

pub fn sqrt_psd<T: Scalar>(m: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
    matrix_function(m, |v| v.sqrt(), false)
}

fn check_dims(dims: &[usize], dim: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Shape(format!(
            "invalid subsystem dimensions {dims:?}"
        )));
    }
    let prod: usize = dims.iter().product();
    if prod != dim {
        return Err(Error::Shape(format!(
            "dims {dims:?} multiply to {prod}, matrix has dim {dim}"
        )));
    }
    Ok(())
}

/// Row-major strides of a mixed-radix index.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Full indices enumerated as (kept multi-index, traced multi-index).
fn split_index_table(dims: &[usize], keep: &[usize]) -> (usize, usize, Vec<usize>) {
    let st = strides(dims);
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let dk: usize = keep.iter().map(|&i| dims[i]).product();
    let dt: usize = traced.iter().map(|&i| dims[i]).product();
    let offsets = |sel: &[usize], count: usize| -> Vec<usize> {
        (0..count)
            .map(|mut flat| {
                let mut off = 0;
                for &s in sel.iter().rev() {
                    off += (flat % dims[s]) * st[s];
                    flat /= dims[s];
                }
                off
            })
            .collect()
    };
    let ko = offsets(keep, dk);
    let to = offsets(&traced, dt);
    let mut table = Vec::with_capacity(dk * dt);
    for k in &ko {
        for t in &to {
            table.push(k + t);
        }
    }
    (dk, dt, table)
}

/// Traces out every subsystem not listed in `keep` (listed order is kept).
pub fn partial_trace<T: Scalar>(
    m: &HermitianMatrix<T>,
    dims: &[usize],
    keep: &[usize],
) -> Result<HermitianMatrix<T>> {
    check_dims(dims, m.dim())?;
    let mut seen = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() || seen[k] {
            return Err(Error::Shape(format!(
                "invalid keep set {keep:?} for {} subsystems",
                dims.len()
            )));
        }
        seen[k] = true;
    }
    if keep.is_empty() {
        return Ok(HermitianMatrix::diag(&[m.trace()]));
    }
    let (dk, dt, table) = split_index_table(dims, keep);
    let src = m.as_matrix();
    let mut out = Matrix::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = C::zero();
            for t in 0..dt {
                acc += src[(table[a * dt + t], table[b * dt + t])];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(HermitianMatrix::symmetrized(out))
}

/// Reorders tensor factors: output factor `j` is input factor `perm[j]`.
pub fn permute_subsystems<T: Scalar>(
    m: &HermitianMatrix<T>,
    dims: &[usize],
    perm: &[usize],
) -> Result<HermitianMatrix<T>> {
    check_dims(dims, m.dim())?;
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..dims.len()).collect::<Vec<_>>() {
        return Err(Error::Shape(format!(
            "{perm:?} is not a permutation of {} factors",
            dims.len()
        )));
    }
    let map = permutation_map(dims, perm);
    let n = m.dim();
    let src = m.as_matrix();
    let out = Matrix::from_fn(n, n, |a, b| src[(map[a], map[b])]);
    Ok(HermitianMatrix::symmetrized(out))
}

/// `map[new_index] = old_index` for a factor permutation.
pub(crate) fn permutation_map(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    let old_strides = strides(dims);
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let n: usize = dims.iter().product();
    (0..n)
        .map(|mut flat| {
            let mut old = 0;
            for j in (0..new_dims.len()).rev() {
                old += (flat % new_dims[j]) * old_strides[perm[j]];
                flat /= new_dims[j];
            }
            old
        })
        .collect()
}

pub fn tensor_product<T: Scalar>(
    m: &HermitianMatrix<T>,
    n: &HermitianMatrix<T>,
) -> Result<HermitianMatrix<T>> {
    tensor_product_capped(m, n, DEFAULT_DIM_CAP)
}

pub fn tensor_product_capped<T: Scalar>(
    m: &HermitianMatrix<T>,
    n: &HermitianMatrix<T>,
    cap: usize,
) -> Result<HermitianMatrix<T>> {
    let dim = m.dim() * n.dim();
    if dim > cap {
        return Err(Error::SizeCap { dim, cap });
    }
    Ok(m.kron(n))
}

/// `{H}_+`: negative eigenvalues clamped to zero.
pub fn positive_part<T: Scalar>(h: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
    let s = eig(h)?;
    Ok(s.reconstruct_with(|v| v.max(T::zero())))
}

/// `tr {H}_+` from eigenvalues alone.
pub fn positive_part_trace<T: Scalar>(h: &HermitianMatrix<T>) -> Result<T> {
    Ok(eigvals(h)?.into_iter().filter(|v| *v > T::zero()).sum())
}

/// `A >= B` up to `tol`: `min_eig(A - B) >= -tol`.
pub fn operator_geq<T: Scalar>(
    a: &HermitianMatrix<T>,
    b: &HermitianMatrix<T>,
    tol: T,
) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!(
            "operator_geq on dims {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(eigvals(&a.sub(b))?[0] >= -tol)
}

/// Projector onto eigenvectors with eigenvalue above `cutoff * max_eig`.
pub fn support_projector<T: Scalar>(
    m: &HermitianMatrix<T>,
    cutoff: T,
) -> Result<HermitianMatrix<T>> {
    let s = eig(m)?;
    Ok(spectrum_support_projector(&s, cutoff))
}

pub(crate) fn spectrum_support_projector<T: Scalar>(
    s: &Spectrum<T>,
    cutoff: T,
) -> HermitianMatrix<T> {
    let cut = support_threshold(&s.values, cutoff);
    s.reconstruct_with(|v| {
        if v > cut && v > T::zero() {
            T::one()
        } else {
            T::zero()
        }
    })
}

/// Number of eigenvalues above the relative support cutoff.
pub fn support_rank<T: Scalar>(values: &[T]) -> usize {
    let cut = support_threshold(values, default_cutoff());
    values
        .iter()
        .filter(|v| **v > cut && **v > T::zero())
        .count()
}

fn psd_sqrt_checked<T: Scalar>(m: &HermitianMatrix<T>, label: &str) -> Result<HermitianMatrix<T>> {
    let s = eig(m)?;
    if let Err(min) = check_psd(&s.values) {
        return Err(Error::NotAState(format!(
            "{label} has eigenvalue {:e}",
            min.to_f64_lossy()
        )));
    }
    Ok(s.reconstruct_with(|v| v.max(T::zero()).sqrt()))
}

/// `F(rho, sigma) = tr|sqrt(rho) sqrt(sigma)|`, the sum of singular values.
pub fn fidelity<T: Scalar>(rho: &HermitianMatrix<T>, sigma: &HermitianMatrix<T>) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Shape(format!(
            "fidelity on dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let a = psd_sqrt_checked(rho, "first argument")?;
    let b = psd_sqrt_checked(sigma, "second argument")?;
    let prod = a.as_matrix().matmul(b.as_matrix());
    Ok(singular_values(&prod)?.into_iter().sum())
}

/// `C(rho, sigma) = sqrt(1 - F^2)`, clamped into `[0, 1]`.
pub fn purified_distance<T: Scalar>(
    rho: &HermitianMatrix<T>,
    sigma: &HermitianMatrix<T>,
) -> Result<T> {
    let f = fidelity(rho, sigma)?;
    Ok((T::one() - f * f).max(T::zero()).sqrt().min(T::one()))
}

/// `(I_A ⊗ S) M (I_A ⊗ S)` computed block by block, with `S` acting on the
/// trailing factor of dimension `S.dim()`.
pub fn sandwich_trailing<T: Scalar>(
    m: &HermitianMatrix<T>,
    s: &HermitianMatrix<T>,
) -> Result<HermitianMatrix<T>> {
    let db = s.dim();
    let n = m.dim();
    if !n.is_multiple_of(db) {
        return Err(Error::Shape(format!(
            "factor of dim {db} does not divide {n}"
        )));
    }
    let da = n / db;
    let src = m.as_matrix();
    let sm = s.as_matrix();
    let mut out = Matrix::zeros(n, n);
    let mut block = Matrix::zeros(db, db);
    for a in 0..da {
        for b in a..da {
            for i in 0..db {
                for j in 0..db {
                    block[(i, j)] = src[(a * db + i, b * db + j)];
                }
            }
            let r = sm.matmul(&block).matmul(sm);
            for i in 0..db {
                for j in 0..db {
                    out[(a * db + i, b * db + j)] = r[(i, j)];
                    if a != b {
                        out[(b * db + j, a * db + i)] = r[(i, j)].conj();
                    }
                }
            }
        }
    }
    Ok(HermitianMatrix::symmetrized(out))
}

/// `I_d ⊗ S`.
pub fn identity_kron<T: Scalar>(d: usize, s: &HermitianMatrix<T>) -> HermitianMatrix<T> {
    HermitianMatrix::<T>::identity(d).kron(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    fn diag(v: &[f64]) -> HermitianMatrix<f64> {
        HermitianMatrix::diag(v)
    }

    #[test]
    fn matrix_function_examples() {
        let r = matrix_function(&diag(&[4.0, 1.0]), |v| v.sqrt(), false).unwrap();
        assert!(r.max_abs_diff(&diag(&[2.0, 1.0])) < 1e-15);
        let r = matrix_function(&diag(&[2.0, 0.0]), |v| 1.0 / v, true).unwrap();
        assert!(r.max_abs_diff(&diag(&[0.5, 0.0])) < 1e-15);
        let err = matrix_function(&diag(&[2.0, 0.0]), |v: f64| v.ln(), false).unwrap_err();
        assert!(matches!(err, Error::Domain { .. }));
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        let rho = HermitianMatrix::projector(&phi);
        let r = partial_trace(&rho, &[2, 2], &[0]).unwrap();
        assert!(r.max_abs_diff(&diag(&[0.5, 0.5])) < 1e-15);
        assert!(partial_trace(&rho, &[2, 3], &[0]).is_err());
    }

    #[test]
    fn partial_trace_keeps_requested_order() {
        let a = diag(&[1.0, 2.0]);
        let b = diag(&[3.0, 5.0, 7.0]);
        let ab = a.kron(&b);
        let ba = partial_trace(&ab, &[2, 3], &[1, 0]).unwrap();
        assert!(ba.max_abs_diff(&b.kron(&a)) < 1e-14);
        let swapped = permute_subsystems(&ab, &[2, 3], &[1, 0]).unwrap();
        assert!(swapped.max_abs_diff(&b.kron(&a)) < 1e-14);
    }

    #[test]
    fn tensor_cap_enforced() {
        let a = HermitianMatrix::<f64>::identity(64);
        assert!(matches!(
            tensor_product(&a, &a.kron(&HermitianMatrix::identity(2))),
            Err(Error::SizeCap { .. })
        ));
        assert_eq!(
            tensor_product(&diag(&[1.0, 2.0]), &diag(&[3.0, 4.0])).unwrap(),
            diag(&[3.0, 4.0, 6.0, 8.0])
        );
    }

    #[test]
    fn positive_part_and_order() {
        assert!(
            positive_part(&diag(&[1.0, -1.0]))
                .unwrap()
                .max_abs_diff(&diag(&[1.0, 0.0]))
                < 1e-15
        );
        let i = HermitianMatrix::<f64>::identity(2);
        let z = HermitianMatrix::<f64>::zeros(2);
        assert!(operator_geq(&i, &z, 1e-9).unwrap());
        assert!(!operator_geq(&z, &i, 1e-9).unwrap());
    }

    #[test]
    fn support_projector_cutoff() {
        let p = support_projector(&diag(&[1.0, 1e-15]), 1e-10).unwrap();
        assert!(p.max_abs_diff(&diag(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn fidelity_examples() {
        let p = diag(&[1.0, 0.0]);
        let q = diag(&[0.5, 0.5]);
        assert!((purified_distance(&p, &q).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((fidelity(&q, &q).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            fidelity(&diag(&[1.0, -0.5]), &q),
            Err(Error::NotAState(_))
        ));
    }

    #[test]
    fn sandwich_matches_dense_product() {
        let m = HermitianMatrix::new(Matrix::from_fn(6, 6, |r, k| {
            c((r + 2 * k) as f64 * 0.1, (r as f64 - k as f64) * 0.3)
        }))
        .unwrap();
        let s = HermitianMatrix::new(Matrix::from_fn(3, 3, |r, k| {
            c((r * k) as f64 + 1.0, r as f64 - k as f64)
        }))
        .unwrap();
        let full = identity_kron(2, &s);
        let dense = HermitianMatrix::new(
            full.as_matrix()
                .matmul(m.as_matrix())
                .matmul(full.as_matrix()),
        )
        .unwrap();
        assert!(sandwich_trailing(&m, &s).unwrap().max_abs_diff(&dense) < 1e-12);
    }
}
