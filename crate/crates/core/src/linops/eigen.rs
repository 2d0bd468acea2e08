//! Hermitian eigensolver: Householder reduction to real tridiagonal form
//! followed by implicit QL with Wilkinson-type shifts.

use num_traits::{One, Zero};

use super::matrix::{HermitianMatrix, Matrix};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, C};

/// Eigen-decomposition `M = U diag(values) U^dag` with ascending values.
#[derive(Clone, Debug)]
pub struct Spectrum<T: Scalar> {
    pub values: Vec<T>,
    /// Columns are the eigenvectors, in the order of `values`.
    pub vectors: Matrix<T>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max_value(&self) -> T {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn min_value(&self) -> T {
        self.values[0]
    }

    pub fn vector(&self, j: usize) -> Vec<C<T>> {
        self.vectors.col(j)
    }

    /// `U diag(f(values)) U^dag`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> HermitianMatrix<T> {
        let mapped: Vec<T> = self.values.iter().map(|v| f(*v)).collect();
        HermitianMatrix::from_spectral(&mapped, &self.vectors)
    }

    pub fn reconstruct(&self) -> HermitianMatrix<T> {
        self.reconstruct_with(|v| v)
    }
}

/// Iteration budget per eigenvalue in the QL sweep.
const QL_ITERATIONS_PER_VALUE: usize = 30;

pub fn eig<T: Scalar>(m: &HermitianMatrix<T>) -> Result<Spectrum<T>> {
    let n = m.dim();
    let tri = tridiagonalize(m, true);
    let mut d = tri.diag;
    let mut e = tri.offdiag;
    let mut zt = Matrix::<T>::zeros(n, n);
    for i in 0..n {
        zt[(i, i)] = C::one();
    }
    ql_implicit(&mut d, &mut e, Some(&mut zt))?;

    // V = (Q D) Z, with Z stored transposed so both factors are read row-wise.
    let qd = tri.basis.expect("basis requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let mut vectors = Matrix::<T>::zeros(n, n);
    let zt_re: Vec<T> = zt.as_slice().iter().map(|z| z.re).collect();
    for r in 0..n {
        let qrow = qd.row(r);
        for (jj, &j) in order.iter().enumerate() {
            let zrow = &zt_re[j * n..(j + 1) * n];
            let mut acc_re = T::zero();
            let mut acc_im = T::zero();
            for (q, z) in qrow.iter().zip(zrow) {
                acc_re += q.re * *z;
                acc_im += q.im * *z;
            }
            vectors[(r, jj)] = C::new(acc_re, acc_im);
        }
    }
    let values = order.iter().map(|&j| d[j]).collect();
    Ok(Spectrum { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigvals<T: Scalar>(m: &HermitianMatrix<T>) -> Result<Vec<T>> {
    let tri = tridiagonalize(m, false);
    let mut d = tri.diag;
    let mut e = tri.offdiag;
    ql_implicit(&mut d, &mut e, None)?;
    d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(d)
}

struct Tridiagonal<T: Scalar> {
    diag: Vec<T>,
    /// `offdiag[i]` couples `i` and `i + 1`; the last entry is zero.
    offdiag: Vec<T>,
    /// `Q D` such that `M = (Q D) T (Q D)^dag` with `T` real.
    basis: Option<Matrix<T>>,
}

fn tridiagonalize<T: Scalar>(m: &HermitianMatrix<T>, want_basis: bool) -> Tridiagonal<T> {
    let n = m.dim();
    let mut a = m.as_matrix().clone();
    let mut q = if want_basis {
        Some(Matrix::<T>::identity(n))
    } else {
        None
    };
    let mut sub: Vec<C<T>> = vec![C::zero(); n];
    let mut u: Vec<C<T>> = vec![C::zero(); n];
    let mut p: Vec<C<T>> = vec![C::zero(); n];

    for k in 0..n.saturating_sub(1) {
        let m_len = n - k - 1;
        let off = k + 1;
        // x = A[k+1.., k] = conj(A[k, k+1..])
        let x0 = a[(k, off)].conj();
        let tail: T = (1..m_len).map(|i| a[(k, off + i)].norm_sqr()).sum();
        if tail == T::zero() {
            sub[k] = x0;
            continue;
        }
        let norm = (x0.norm_sqr() + tail).sqrt();
        let x0_abs = x0.norm();
        let phase = if x0_abs > T::zero() {
            x0.unscale(x0_abs)
        } else {
            C::one()
        };
        // u = x + phase * norm * e1; H x = -phase * norm * e1
        u[0] = x0 + phase.scale(norm);
        for i in 1..m_len {
            u[i] = a[(k, off + i)].conj();
        }
        let unorm2: T = u[..m_len].iter().map(|z| z.norm_sqr()).sum();
        let beta = T::lit(2.0) / unorm2;
        sub[k] = -phase.scale(norm);

        // p = beta * A_sub u
        let us = &u[..m_len];
        for i in 0..m_len {
            let row = &a.row(off + i)[off..];
            let (mut sr, mut si) = (T::zero(), T::zero());
            for (aij, uj) in row.iter().zip(us) {
                sr += aij.re * uj.re - aij.im * uj.im;
                si += aij.re * uj.im + aij.im * uj.re;
            }
            p[i] = C::new(sr * beta, si * beta);
        }
        // K = beta * (u^dag p) / 2 (real), q = p - K u
        let kk: T = us
            .iter()
            .zip(&p[..m_len])
            .map(|(ui, pi)| (ui.conj() * *pi).re)
            .sum::<T>()
            * beta
            * T::lit(0.5);
        for i in 0..m_len {
            p[i] -= us[i].scale(kk);
        }
        // A_sub -= u q^dag + q u^dag
        let qs = &p[..m_len];
        let cols = a.cols();
        let data = a.as_mut_slice();
        for i in 0..m_len {
            let ui = us[i];
            let qi = qs[i];
            let row = &mut data[(off + i) * cols + off..(off + i) * cols + n];
            for ((aij, uj), qj) in row.iter_mut().zip(us).zip(qs) {
                // ui * conj(qj) + qi * conj(uj)
                let re = ui.re * qj.re + ui.im * qj.im + qi.re * uj.re + qi.im * uj.im;
                let im = ui.im * qj.re - ui.re * qj.im + qi.im * uj.re - qi.re * uj.im;
                aij.re -= re;
                aij.im -= im;
            }
        }
        // Q <- Q H on columns off..n
        if let Some(qm) = q.as_mut() {
            let cols = qm.cols();
            let data = qm.as_mut_slice();
            for r in 0..n {
                let row = &mut data[r * cols + off..r * cols + n];
                let (mut sr, mut si) = (T::zero(), T::zero());
                for (qrj, uj) in row.iter().zip(us) {
                    sr += qrj.re * uj.re - qrj.im * uj.im;
                    si += qrj.re * uj.im + qrj.im * uj.re;
                }
                let s = C::new(sr * beta, si * beta);
                if s.re == T::zero() && s.im == T::zero() {
                    continue;
                }
                for (qrj, uj) in row.iter_mut().zip(us) {
                    *qrj -= s * uj.conj();
                }
            }
        }
    }

    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    // Phase fix: D_0 = 1, D_{k+1} = D_k * sub_k / |sub_k| makes T real.
    let mut offdiag = vec![T::zero(); n];
    let mut phases = vec![C::<T>::one(); n];
    for k in 0..n.saturating_sub(1) {
        let s = sub[k];
        let mag = s.norm();
        offdiag[k] = mag;
        phases[k + 1] = if mag > T::zero() {
            phases[k] * s.unscale(mag)
        } else {
            phases[k]
        };
    }
    let basis = q.map(|mut qm| {
        for r in 0..n {
            for c in 0..n {
                qm[(r, c)] *= phases[c];
            }
        }
        qm
    });
    Tridiagonal {
        diag,
        offdiag,
        basis,
    }
}

/// Implicit QL on a real symmetric tridiagonal matrix. `zt` holds the
/// accumulated rotations transposed (row `i` is eigenvector `i`).
fn ql_implicit<T: Scalar>(d: &mut [T], e: &mut [T], mut zt: Option<&mut Matrix<T>>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let eps = T::epsilon();
    let two = T::lit(2.0);
    let cap = QL_ITERATIONS_PER_VALUE * n.max(1);
    let mut total = 0usize;
    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            total += 1;
            if total > cap {
                return Err(Error::NoConvergence {
                    dim: n,
                    iterations: total,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = zt.as_deref_mut() {
                    let cols = z.cols();
                    let data = z.as_mut_slice();
                    let (lo, hi) = data.split_at_mut((i + 1) * cols);
                    let zi = &mut lo[i * cols..];
                    let zi1 = &mut hi[..cols];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let f = b.re;
                        b.re = s * a.re + c * f;
                        a.re = c * a.re - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}
