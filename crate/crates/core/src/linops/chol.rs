use num_traits::Zero;

use super::matrix::Matrix;
use crate::scalar::{Scalar, C};

/// Lower Cholesky factor of a Hermitian positive definite matrix.
#[derive(Clone, Debug)]
pub struct Cholesky<T: Scalar> {
    l: Matrix<T>,
}

impl<T: Scalar> Cholesky<T> {
    /// `None` when `a` is not numerically positive definite.
    pub fn new(a: &Matrix<T>) -> Option<Self> {
        let n = a.rows();
        let mut l = Matrix::<T>::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > T::zero()) || !d.is_finite() {
                return None;
            }
            let djj = d.sqrt();
            l[(j, j)] = C::new(djj, T::zero());
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s.unscale(djj);
            }
        }
        Some(Self { l })
    }

    /// Natural log of the determinant.
    pub fn ln_det(&self) -> T {
        let two = T::lit(2.0);
        (0..self.l.rows())
            .map(|i| two * self.l[(i, i)].re.ln())
            .sum()
    }

    pub fn solve(&self, b: &[C<T>]) -> Vec<C<T>> {
        let n = self.l.rows();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[(i, k)] * y[k];
            }
            y[i] = s.unscale(self.l[(i, i)].re);
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[(k, i)].conj() * y[k];
            }
            y[i] = s.unscale(self.l[(i, i)].re);
        }
        y
    }

    pub fn inverse(&self) -> Matrix<T> {
        let n = self.l.rows();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![C::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = C::zero());
            e[j] = C::new(T::one(), T::zero());
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}
