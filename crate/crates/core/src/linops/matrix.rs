use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, C};

/// Dense row-major complex matrix of arbitrary shape.
///
/// Used for Kraus operators, isometries, eigenvector bases and the
/// non-Hermitian intermediates (`G`, `sqrt(rho) sqrt(sigma)`).
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C::zero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Column vector from a slice.
    pub fn column(v: &[C<T>]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C<T>] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C<T>> {
        self.data
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[C<T>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<C<T>> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)];
            }
        }
        out
    }

    /// `self * rhs`; panics on inner dimension mismatch.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul inner dimension");
        let mut out = Self::zeros(self.rows, rhs.cols);
        let n = rhs.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let b_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * *b;
                }
            }
        }
        out
    }

    /// `self^dag * rhs` without materializing the adjoint.
    pub fn adjoint_matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "adjoint_matmul inner dimension");
        let mut out = Self::zeros(self.cols, rhs.cols);
        let n = rhs.cols;
        for k in 0..self.rows {
            let b_row = &rhs.data[k * n..(k + 1) * n];
            for i in 0..self.cols {
                let a = self.data[k * self.cols + i].conj();
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let out_row = &mut out.data[i * n..(i + 1) * n];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * *b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| *a * *b).sum())
            .collect()
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    let base = (i * rhs.rows + k) * cols + j * rhs.cols;
                    let src = rhs.row(k);
                    for (o, b) in out.data[base..base + rhs.cols].iter_mut().zip(src) {
                        *o = a * *b;
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.scale(s)).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Max-norm distance to `rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    /// Max deviation of `self^dag self` from the identity.
    pub fn isometry_defect(&self) -> T {
        self.adjoint_matmul(self)
            .max_abs_diff(&Self::identity(self.cols))
    }

    pub fn map_entries(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| f(*z)).collect(),
        }
    }
}

impl<T: Scalar> Index<(usize, usize)> for Matrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C<T> {
        &mut self.data[r * self.cols + c]
    }
}

/// Square complex matrix equal to its own adjoint.
///
/// Hermiticity holds exactly: every constructor symmetrizes its input as
/// `(M + M^dag) / 2` and zeroes the imaginary part of the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T: Scalar> {
    inner: Matrix<T>,
}

impl<T: Scalar> HermitianMatrix<T> {
    /// Symmetrizes a square matrix.
    pub fn new(m: Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape(format!(
                "{}x{} is not square",
                m.rows(),
                m.cols()
            )));
        }
        if m.rows() == 0 {
            return Err(Error::Shape("empty matrix".into()));
        }
        Ok(Self::symmetrized(m))
    }

    pub(crate) fn symmetrized(mut m: Matrix<T>) -> Self {
        let n = m.rows();
        let half = T::lit(0.5);
        for i in 0..n {
            m[(i, i)].im = T::zero();
            for j in (i + 1)..n {
                let a = m[(i, j)];
                let b = m[(j, i)].conj();
                let avg = (a + b).scale(half);
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        Self { inner: m }
    }

    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != n {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {n}",
                    r.len()
                )));
            }
            data.extend(r);
        }
        Self::new(Matrix::from_vec(n, n, data)?)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|x| T::real(T::lit(*x))).collect())
                .collect(),
        )
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: Matrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: Matrix::identity(dim),
        }
    }

    pub fn diag(values: &[T]) -> Self {
        let mut m = Matrix::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = T::real(*v);
        }
        Self { inner: m }
    }

    /// `|psi><psi|`.
    pub fn projector(psi: &[C<T>]) -> Self {
        let n = psi.len();
        Self::symmetrized(Matrix::from_fn(n, n, |r, c| psi[r] * psi[c].conj()))
    }

    /// `V diag(values) V^dag` for a matrix whose columns are eigenvectors.
    pub fn from_spectral(values: &[T], vectors: &Matrix<T>) -> Self {
        let n = vectors.rows();
        let k = values.len();
        assert_eq!(vectors.cols(), k);
        let mut out = Matrix::zeros(n, n);
        // Row-scaled copy of V^dag: (diag(values) V^dag)
        let mut scaled = Matrix::zeros(k, n);
        for j in 0..k {
            let v = values[j];
            if v == T::zero() {
                continue;
            }
            for r in 0..n {
                scaled[(j, r)] = vectors[(r, j)].conj().scale(v);
            }
        }
        for r in 0..n {
            let out_row = &mut out.as_mut_slice()[r * n..(r + 1) * n];
            for j in 0..k {
                let a = vectors[(r, j)];
                if values[j] == T::zero() {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(scaled.row(j)) {
                    *o += a * *b;
                }
            }
        }
        Self::symmetrized(out)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    #[inline]
    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.inner
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C<T> {
        self.inner[(r, c)]
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).map(|i| self.inner[(i, i)].re).sum()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            inner: self.inner.add(&rhs.inner),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            inner: self.inner.sub(&rhs.inner),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            inner: self.inner.scale_real(s),
        }
    }

    pub fn add_identity(&self, s: T) -> Self {
        let mut m = self.inner.clone();
        for i in 0..self.dim() {
            m[(i, i)].re += s;
        }
        Self { inner: m }
    }

    /// `V self V^dag` for any (possibly rectangular) `V`.
    pub fn conjugate_by(&self, v: &Matrix<T>) -> Self {
        assert_eq!(v.cols(), self.dim(), "conjugate_by shape");
        let vh = v.matmul(&self.inner);
        Self::symmetrized(vh.matmul(&v.adjoint()))
    }

    /// `<psi| self |psi>`, real because `self` is Hermitian.
    pub fn expectation(&self, psi: &[C<T>]) -> T {
        let hv = self.inner.mul_vec(psi);
        psi.iter().zip(&hv).map(|(a, b)| (a.conj() * *b).re).sum()
    }

    /// `tr(self * rhs)`, real for Hermitian operands.
    pub fn trace_product(&self, rhs: &Self) -> T {
        let n = self.dim();
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                acc += (self.inner[(i, j)] * rhs.inner[(j, i)]).re;
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        self.inner.max_abs_diff(&rhs.inner)
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        Self {
            inner: self.inner.kron(&rhs.inner),
        }
    }
}
