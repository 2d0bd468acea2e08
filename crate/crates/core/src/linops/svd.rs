//! One-sided (Hestenes) Jacobi singular value decomposition.

use num_traits::Zero;

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{Scalar, C};

const MAX_SWEEPS: usize = 80;

/// Thin SVD `A = U diag(s) V^dag` restricted to nonzero singular values.
#[derive(Clone, Debug)]
pub struct Svd<T: Scalar> {
    /// Descending.
    pub values: Vec<T>,
    /// `m x r`, orthonormal columns.
    pub u: Matrix<T>,
    /// `n x r`, orthonormal columns.
    pub v: Matrix<T>,
}

impl<T: Scalar> Svd<T> {
    /// Partial isometry `U V^dag`, the polar factor of `A` on its support.
    pub fn polar(&self) -> Matrix<T> {
        self.u.matmul(&self.v.adjoint())
    }

    pub fn nuclear_norm(&self) -> T {
        self.values.iter().copied().sum()
    }
}

pub fn singular_values<T: Scalar>(a: &Matrix<T>) -> Result<Vec<T>> {
    let (cols, _) = jacobi(a, false)?;
    let mut s: Vec<T> = cols.iter().map(|c| norm(c)).collect();
    s.sort_by(|x, y| y.partial_cmp(x).expect("finite singular values"));
    Ok(s)
}

pub fn svd<T: Scalar>(a: &Matrix<T>) -> Result<Svd<T>> {
    let (cols, vcols) = jacobi(a, true)?;
    let vcols = vcols.expect("requested");
    let m = a.rows();
    let n = a.cols();
    let norms: Vec<T> = cols.iter().map(|c| norm(c)).collect();
    let top = norms.iter().fold(T::zero(), |x, y| x.max(*y));
    let floor = top * T::epsilon() * T::lit((m.max(n)) as f64);
    let mut order: Vec<usize> = (0..n)
        .filter(|&j| norms[j] > floor && norms[j] > T::zero())
        .collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).expect("finite"));
    let r = order.len();
    let mut u = Matrix::zeros(m, r);
    let mut v = Matrix::zeros(n, r);
    let mut values = Vec::with_capacity(r);
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        values.push(s);
        for i in 0..m {
            u[(i, k)] = cols[j][i].unscale(s);
        }
        for i in 0..n {
            v[(i, k)] = vcols[j][i];
        }
    }
    Ok(Svd { values, u, v })
}

fn norm<T: Scalar>(c: &[C<T>]) -> T {
    c.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

type Columns<T> = Vec<Vec<C<T>>>;

fn jacobi<T: Scalar>(a: &Matrix<T>, want_v: bool) -> Result<(Columns<T>, Option<Columns<T>>)> {
    let n = a.cols();
    let mut cols: Columns<T> = (0..n).map(|j| a.col(j)).collect();
    let mut vcols: Option<Columns<T>> = want_v.then(|| {
        (0..n)
            .map(|j| {
                let mut e = vec![C::zero(); n];
                e[j] = C::new(T::one(), T::zero());
                e
            })
            .collect()
    });
    let tol = T::epsilon() * T::lit(a.rows().max(1) as f64).sqrt();
    // Columns reduced to round-off are treated as zero.
    let frob = a.frobenius_norm();
    let negligible = (T::epsilon() * frob) * (T::epsilon() * frob);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: T = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: T = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C<T> = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .map(|(x, y)| x.conj() * *y)
                    .sum();
                let g = gamma.norm();
                if g == T::zero()
                    || alpha <= negligible
                    || beta <= negligible
                    || g <= tol * (alpha * beta).sqrt()
                {
                    continue;
                }
                rotated = true;
                let phase = (gamma.unscale(g)).conj();
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, phase, c, s);
                if let Some(v) = vcols.as_mut() {
                    rotate(v, p, q, phase, c, s);
                }
            }
        }
        if !rotated {
            return Ok((cols, vcols));
        }
    }
    Err(Error::NoConvergence {
        dim: n,
        iterations: MAX_SWEEPS,
    })
}

/// `a_p <- c a_p - s e^{-i phi} a_q`, `a_q <- s a_p + c e^{-i phi} a_q`.
fn rotate<T: Scalar>(cols: &mut Columns<T>, p: usize, q: usize, phase: C<T>, c: T, s: T) {
    let (lo, hi) = cols.split_at_mut(q);
    let cp = &mut lo[p];
    let cq = &mut hi[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let yq = *y * phase;
        let xp = *x;
        *x = xp.scale(c) - yq.scale(s);
        *y = xp.scale(s) + yq.scale(c);
    }
}
