//! Density operators with subsystem structure, channels, isometries, and
//! seeded random generators.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linops::ops::{check_psd, permutation_map, support_threshold};
use crate::linops::{
    eig, eigvals, fidelity, partial_trace, purified_distance, HermitianMatrix, Matrix,
    DEFAULT_DIM_CAP,
};
use crate::scalar::{Scalar, C};

/// A positive semidefinite operator with trace at most one.
///
/// `dims` lists the tensor factors; the first `split` of them form the
/// conditioned system A, the rest form B. Conditioning states `sigma_B`
/// act on the product of `dims[split..]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator<T: Scalar> {
    matrix: HermitianMatrix<T>,
    dims: Vec<usize>,
    normalized: bool,
    split: usize,
}

impl<T: Scalar> AsRef<HermitianMatrix<T>> for DensityOperator<T> {
    fn as_ref(&self) -> &HermitianMatrix<T> {
        &self.matrix
    }
}

fn default_split(dims: &[usize]) -> usize {
    1.min(dims.len())
}

impl<T: Scalar> DensityOperator<T> {
    /// Validates positivity and trace; small negative eigenvalues are clamped.
    pub fn new(matrix: HermitianMatrix<T>, dims: Vec<usize>) -> Result<Self> {
        let split = default_split(&dims);
        Self::with_split(matrix, dims, split)
    }

    pub fn with_split(matrix: HermitianMatrix<T>, dims: Vec<usize>, split: usize) -> Result<Self> {
        check_dims(&dims, matrix.dim())?;
        if split > dims.len() {
            return Err(Error::Shape(format!(
                "split {split} beyond {} subsystems",
                dims.len()
            )));
        }
        let values = eigvals(&matrix)?;
        if let Err(min) = check_psd(&values) {
            return Err(Error::NotAState(format!(
                "negative eigenvalue {:e}",
                min.to_f64_lossy()
            )));
        }
        let matrix = if values[0] < T::zero() {
            eig(&matrix)?.reconstruct_with(|v| v.max(T::zero()))
        } else {
            matrix
        };
        let tr = matrix.trace();
        let tol = T::lit(T::TRACE_TOLERANCE);
        if tr > T::one() + tol {
            return Err(Error::NotAState(format!("trace {} exceeds 1", tr)));
        }
        let normalized = (tr - T::one()).abs() <= tol;
        Ok(Self {
            matrix,
            dims,
            normalized,
            split,
        })
    }

    /// Skips validation; callers guarantee the invariants (tensor powers,
    /// conjugations by isometries of validated states).
    pub(crate) fn from_parts_unchecked(
        matrix: HermitianMatrix<T>,
        dims: Vec<usize>,
        split: usize,
    ) -> Self {
        let tr = matrix.trace();
        let normalized = (tr - T::one()).abs() <= T::lit(T::TRACE_TOLERANCE);
        Self {
            matrix,
            dims,
            normalized,
            split,
        }
    }

    pub fn from_pure(psi: &[C<T>], dims: Vec<usize>) -> Result<Self> {
        Self::new(HermitianMatrix::projector(psi), dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        let split = default_split(&dims);
        Self::from_parts_unchecked(
            HermitianMatrix::identity(d).scale(T::one() / T::lit(d as f64)),
            dims,
            split,
        )
    }

    /// Returns the same state with a different A|B cut.
    pub fn resplit(&self, split: usize) -> Result<Self> {
        if split > self.dims.len() {
            return Err(Error::Shape(format!(
                "split {split} beyond {} subsystems",
                self.dims.len()
            )));
        }
        Ok(Self {
            split,
            ..self.clone()
        })
    }

    pub fn matrix(&self) -> &HermitianMatrix<T> {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    pub fn split(&self) -> usize {
        self.split
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn dim_a(&self) -> usize {
        self.dims[..self.split].iter().product()
    }

    pub fn dim_b(&self) -> usize {
        self.dims[self.split..].iter().product()
    }

    pub fn trace(&self) -> T {
        self.matrix.trace()
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        eigvals(&self.matrix)
    }

    /// Reduced state on the listed subsystems, in the listed order.
    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        let m = partial_trace(&self.matrix, &self.dims, keep)?;
        let dims = if keep.is_empty() {
            vec![1]
        } else {
            keep.iter().map(|&k| self.dims[k]).collect()
        };
        let split = default_split(&dims);
        Ok(Self::from_parts_unchecked(m, dims, split))
    }

    /// `rho_B`, a 1x1 state when B is trivial.
    pub fn marginal_b(&self) -> Result<Self> {
        let keep: Vec<usize> = (self.split..self.dims.len()).collect();
        let mut m = self.marginal(&keep)?;
        m.split = 0;
        Ok(m)
    }

    pub fn marginal_a(&self) -> Result<Self> {
        let keep: Vec<usize> = (0..self.split).collect();
        self.marginal(&keep)
    }

    pub fn fidelity(&self, other: &Self) -> Result<T> {
        fidelity(&self.matrix, &other.matrix)
    }

    pub fn purified_distance(&self, other: &Self) -> Result<T> {
        purified_distance(&self.matrix, &other.matrix)
    }

    /// Conditioning state check: `sigma` must live on B.
    pub fn check_conditioning(&self, sigma: &Self) -> Result<()> {
        if sigma.dim() != self.dim_b() {
            return Err(Error::Shape(format!(
                "sigma has dim {}, the B system of rho has dim {} (dims {:?}, split {})",
                sigma.dim(),
                self.dim_b(),
                self.dims,
                self.split
            )));
        }
        Ok(())
    }
}

fn check_dims(dims: &[usize], dim: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Shape(format!(
            "invalid subsystem dimensions {dims:?}"
        )));
    }
    let p: usize = dims.iter().product();
    if p != dim {
        return Err(Error::Shape(format!(
            "dims {dims:?} multiply to {p}, matrix has dim {dim}"
        )));
    }
    Ok(())
}

/// Outcome of testing `supp(rho_B) ⊆ supp(sigma)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportCheck {
    /// `tr(P_ker(sigma) rho_B) / tr(rho_B)`.
    pub leakage: f64,
    pub violated: bool,
    /// Leakage within three decades of the cutoff: the verdict depends on it.
    pub cutoff_sensitive: bool,
}

/// Weight of `rho_b` outside the support of `sigma`.
pub fn support_check<T: Scalar>(
    rho_b: &HermitianMatrix<T>,
    sigma: &HermitianMatrix<T>,
) -> Result<SupportCheck> {
    let s = eig(sigma)?;
    let cut = support_threshold(&s.values, T::lit(T::SUPPORT_CUTOFF));
    let mut leak = T::zero();
    for (j, &v) in s.values.iter().enumerate() {
        if v <= cut {
            leak += rho_b.expectation(&s.vector(j));
        }
    }
    let tr = rho_b.trace();
    let rel = if tr > T::zero() {
        (leak / tr).max(T::zero()).to_f64_lossy()
    } else {
        0.0
    };
    let cutoff = T::SUPPORT_CUTOFF;
    Ok(SupportCheck {
        leakage: rel,
        violated: rel > cutoff,
        cutoff_sensitive: rel > cutoff * 1e-3 && rel < cutoff * 1e3,
    })
}

/// Trace-preserving completely positive map in Kraus form.
#[derive(Clone, Debug)]
pub struct QuantumChannel<T: Scalar> {
    kraus: Vec<Matrix<T>>,
}

fn tp_defect<T: Scalar>(kraus: &[Matrix<T>]) -> T {
    let din = kraus[0].cols();
    let mut sum = Matrix::zeros(din, din);
    for k in kraus {
        sum = sum.add(&k.adjoint_matmul(k));
    }
    sum.max_abs_diff(&Matrix::identity(din))
}

impl<T: Scalar> QuantumChannel<T> {
    pub fn new(kraus: Vec<Matrix<T>>) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::Parameter(
                "a channel needs at least one Kraus operator".into(),
            ));
        };
        let (dout, din) = (first.rows(), first.cols());
        if kraus.iter().any(|k| k.rows() != dout || k.cols() != din) {
            return Err(Error::Shape("Kraus operators differ in shape".into()));
        }
        let defect = tp_defect(&kraus);
        if defect > T::tol(1e-9) {
            return Err(Error::NotTracePreserving(defect.to_f64_lossy()));
        }
        Ok(Self { kraus })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            kraus: vec![Matrix::identity(d)],
        }
    }

    /// `X ↦ tr(X)`, output dimension 1.
    pub fn trace_out(d: usize) -> Self {
        let kraus = (0..d)
            .map(|i| {
                let mut k = Matrix::zeros(1, d);
                k[(0, i)] = C::one();
                k
            })
            .collect();
        Self { kraus }
    }

    pub fn from_isometry(v: &Isometry<T>) -> Self {
        Self {
            kraus: vec![v.matrix().clone()],
        }
    }

    /// The same map acting on factor `subsystem` of a space with factors
    /// `dims`, as a channel on the whole space.
    pub fn embed(&self, dims: &[usize], subsystem: usize) -> Result<Self> {
        if subsystem >= dims.len() || dims[subsystem] != self.din() {
            return Err(Error::Shape(format!(
                "channel with input dim {} cannot act on factor {subsystem} of {dims:?}",
                self.din()
            )));
        }
        Ok(Self {
            kraus: self
                .kraus
                .iter()
                .map(|k| embed_local(dims, subsystem, k))
                .collect(),
        })
    }

    pub fn kraus(&self) -> &[Matrix<T>] {
        &self.kraus
    }

    pub fn din(&self) -> usize {
        self.kraus[0].cols()
    }

    pub fn dout(&self) -> usize {
        self.kraus[0].rows()
    }

    pub fn tp_defect(&self) -> T {
        tp_defect(&self.kraus)
    }

    /// `E(X)` on a bare operator of dimension `din`.
    pub fn apply_operator(&self, x: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
        if x.dim() != self.din() {
            return Err(Error::Shape(format!(
                "channel input dim {} vs operator dim {}",
                self.din(),
                x.dim()
            )));
        }
        let mut out = HermitianMatrix::zeros(self.dout());
        for k in &self.kraus {
            out = out.add(&x.conjugate_by(k));
        }
        Ok(out)
    }
}

/// Linear map with `V^dag V = I`.
#[derive(Clone, Debug)]
pub struct Isometry<T: Scalar> {
    matrix: Matrix<T>,
}

impl<T: Scalar> Isometry<T> {
    pub fn new(matrix: Matrix<T>) -> Result<Self> {
        if matrix.rows() < matrix.cols() {
            return Err(Error::Shape(format!(
                "{}x{} cannot be an isometry",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.isometry_defect();
        if defect > T::tol(1e-9) {
            return Err(Error::NotIsometry(defect.to_f64_lossy()));
        }
        Ok(Self { matrix })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            matrix: Matrix::identity(d),
        }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn din(&self) -> usize {
        self.matrix.cols()
    }

    pub fn dout(&self) -> usize {
        self.matrix.rows()
    }
}

/// `I ⊗ K ⊗ I` with `K` acting on factor `subsystem`.
fn embed_local<T: Scalar>(dims: &[usize], subsystem: usize, k: &Matrix<T>) -> Matrix<T> {
    let left: usize = dims[..subsystem].iter().product();
    let right: usize = dims[subsystem + 1..].iter().product();
    Matrix::identity(left)
        .kron(k)
        .kron(&Matrix::identity(right))
}

fn check_subsystem<T: Scalar>(
    rho: &DensityOperator<T>,
    subsystem: usize,
    din: usize,
) -> Result<()> {
    if subsystem >= rho.dims.len() {
        return Err(Error::Shape(format!(
            "subsystem {subsystem} out of range for dims {:?}",
            rho.dims
        )));
    }
    if rho.dims[subsystem] != din {
        return Err(Error::Shape(format!(
            "map input dim {din} does not match subsystem {subsystem} of dim {}",
            rho.dims[subsystem]
        )));
    }
    Ok(())
}

/// `(I ⊗ E ⊗ I)(rho)` with `E` on factor `subsystem`.
pub fn apply_channel<T: Scalar>(
    rho: &DensityOperator<T>,
    channel: &QuantumChannel<T>,
    subsystem: usize,
) -> Result<DensityOperator<T>> {
    check_subsystem(rho, subsystem, channel.din())?;
    let mut dims = rho.dims.clone();
    dims[subsystem] = channel.dout();
    let d: usize = dims.iter().product();
    let mut out = HermitianMatrix::zeros(d);
    for k in &channel.kraus {
        out = out.add(
            &rho.matrix
                .conjugate_by(&embed_local(&rho.dims, subsystem, k)),
        );
    }
    Ok(DensityOperator::from_parts_unchecked(out, dims, rho.split))
}

pub fn apply_isometry<T: Scalar>(
    rho: &DensityOperator<T>,
    v: &Isometry<T>,
    subsystem: usize,
) -> Result<DensityOperator<T>> {
    check_subsystem(rho, subsystem, v.din())?;
    let mut dims = rho.dims.clone();
    dims[subsystem] = v.dout();
    let out = rho
        .matrix
        .conjugate_by(&embed_local(&rho.dims, subsystem, &v.matrix));
    Ok(DensityOperator::from_parts_unchecked(out, dims, rho.split))
}

/// `diag(P)` on a single system (B trivial).
pub fn embed_classical<T: Scalar>(p: &[T]) -> Result<DensityOperator<T>> {
    if p.is_empty() {
        return Err(Error::Parameter("empty probability vector".into()));
    }
    if let Some(x) = p.iter().find(|x| !(**x >= T::zero())) {
        return Err(Error::Parameter(format!(
            "probability entry {x} is negative"
        )));
    }
    let total: T = p.iter().copied().sum();
    if total > T::one() + T::lit(T::TRACE_TOLERANCE) {
        return Err(Error::Parameter(format!(
            "probabilities sum to {total} > 1"
        )));
    }
    Ok(DensityOperator::from_parts_unchecked(
        HermitianMatrix::diag(p),
        vec![p.len()],
        1,
    ))
}

/// `rho^{⊗n}` in block order: all A factors of the copies first, then all
/// B factors. With `k = dims.len()` and `s = split`, output factor order is
/// `(copy 0 factors 0..s, ..., copy n-1 factors 0..s, copy 0 factors s..k, ...)`.
pub fn tensor_power<T: Scalar>(rho: &DensityOperator<T>, n: usize) -> Result<DensityOperator<T>> {
    tensor_power_capped(rho, n, DEFAULT_DIM_CAP)
}

pub fn tensor_power_capped<T: Scalar>(
    rho: &DensityOperator<T>,
    n: usize,
    cap: usize,
) -> Result<DensityOperator<T>> {
    if n == 0 {
        return Err(Error::Parameter("tensor power needs n >= 1".into()));
    }
    let dim = (rho.dim() as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    if dim > cap as u128 {
        return Err(Error::SizeCap {
            dim: dim.min(usize::MAX as u128) as usize,
            cap,
        });
    }
    if n == 1 {
        return Ok(rho.clone());
    }
    let mut m = rho.matrix.clone();
    for _ in 1..n {
        m = m.kron(&rho.matrix);
    }
    let k = rho.dims.len();
    let s = rho.split;
    let interleaved: Vec<usize> = (0..n).flat_map(|_| rho.dims.iter().copied()).collect();
    let mut perm = Vec::with_capacity(n * k);
    for c in 0..n {
        perm.extend((0..s).map(|f| c * k + f));
    }
    for c in 0..n {
        perm.extend((s..k).map(|f| c * k + f));
    }
    let dims: Vec<usize> = perm.iter().map(|&p| interleaved[p]).collect();
    let m = if s == 0 || s == k {
        m
    } else {
        permute_dense(&m, &interleaved, &perm)
    };
    Ok(DensityOperator::from_parts_unchecked(m, dims, s * n))
}

fn permute_dense<T: Scalar>(
    m: &HermitianMatrix<T>,
    dims: &[usize],
    perm: &[usize],
) -> HermitianMatrix<T> {
    let map = permutation_map(dims, perm);
    let n = m.dim();
    let src = m.as_matrix();
    let mut data = Vec::with_capacity(n * n);
    for &a in &map {
        let row = src.row(a);
        data.extend(map.iter().map(|&b| row[b]));
    }
    HermitianMatrix::symmetrized(Matrix::from_vec(n, n, data).expect("square"))
}

/// `(sqrt(rho) ⊗ 1)|gamma>` with `|gamma> = sum_i |i>|i>`; the copy is
/// appended as the last factor and the A|B cut is unchanged.
pub fn purify<T: Scalar>(rho: &DensityOperator<T>) -> Result<DensityOperator<T>> {
    let s = eig(&rho.matrix)?;
    let root = s.reconstruct_with(|v| v.max(T::zero()).sqrt());
    let d = rho.dim();
    let psi: Vec<C<T>> = root.as_matrix().as_slice().to_vec();
    let mut dims = rho.dims.clone();
    dims.push(d);
    Ok(DensityOperator::from_parts_unchecked(
        HermitianMatrix::projector(&psi),
        dims,
        rho.split,
    ))
}

/// Spectral purification `sum_k sqrt(nu_k) |v_k>|k>` over the support only,
/// so the purifying factor has dimension `rank(rho)`.
pub fn purify_compact<T: Scalar>(rho: &DensityOperator<T>) -> Result<DensityOperator<T>> {
    let s = eig(&rho.matrix)?;
    let cut = support_threshold(&s.values, T::lit(T::SUPPORT_CUTOFF));
    let support: Vec<usize> = (0..s.dim())
        .filter(|&j| s.values[j] > cut && s.values[j] > T::zero())
        .collect();
    let r = support.len().max(1);
    let d = rho.dim();
    let mut psi = vec![C::zero(); d * r];
    for (k, &j) in support.iter().enumerate() {
        let w = s.values[j].sqrt();
        for i in 0..d {
            psi[i * r + k] = s.vectors[(i, j)].scale(w);
        }
    }
    let mut dims = rho.dims.clone();
    dims.push(r);
    Ok(DensityOperator::from_parts_unchecked(
        HermitianMatrix::projector(&psi),
        dims,
        rho.split,
    ))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<T: Scalar>(r: &mut ChaCha8Rng) -> C<T> {
    let re: f64 = r.sample(StandardNormal);
    let im: f64 = r.sample(StandardNormal);
    C::new(T::lit(re), T::lit(im))
}

fn ginibre<T: Scalar>(rows: usize, cols: usize, r: &mut ChaCha8Rng) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| gaussian(r))
}

/// `G G^dag / tr` with `G` a `dim x rank` complex Gaussian matrix.
pub fn random_density<T: Scalar>(dim: usize, rank: usize, seed: u64) -> Result<DensityOperator<T>> {
    random_density_dims(vec![dim], rank, seed)
}

/// As [`random_density`] on a multipartite space.
pub fn random_density_dims<T: Scalar>(
    dims: Vec<usize>,
    rank: usize,
    seed: u64,
) -> Result<DensityOperator<T>> {
    check_dims(&dims, dims.iter().product())?;
    let dim: usize = dims.iter().product();
    if rank == 0 || rank > dim {
        return Err(Error::Parameter(format!(
            "rank {rank} must lie in 1..={dim}"
        )));
    }
    let g = ginibre::<T>(dim, rank, &mut rng(seed));
    let gg = HermitianMatrix::symmetrized(g.matmul(&g.adjoint()));
    let tr = gg.trace();
    let split = default_split(&dims);
    Ok(DensityOperator::from_parts_unchecked(
        gg.scale(T::one() / tr),
        dims,
        split,
    ))
}

/// Haar-distributed pure state.
pub fn random_pure<T: Scalar>(dims: Vec<usize>, seed: u64) -> Result<DensityOperator<T>> {
    random_density_dims(dims, 1, seed)
}

/// Modified Gram-Schmidt on Gaussian columns.
pub fn random_isometry<T: Scalar>(din: usize, dout: usize, seed: u64) -> Result<Isometry<T>> {
    if din == 0 || din > dout {
        return Err(Error::Parameter(format!(
            "no isometry from dim {din} into dim {dout}"
        )));
    }
    let g = ginibre::<T>(dout, din, &mut rng(seed));
    let mut cols: Vec<Vec<C<T>>> = (0..din).map(|j| g.col(j)).collect();
    for j in 0..din {
        for _ in 0..2 {
            for i in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let proj: C<T> = done[i]
                    .iter()
                    .zip(&rest[0])
                    .map(|(a, b)| a.conj() * *b)
                    .sum();
                for (x, q) in rest[0].iter_mut().zip(&done[i]) {
                    *x -= proj * *q;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        for x in cols[j].iter_mut() {
            *x = x.unscale(norm);
        }
    }
    let m = Matrix::from_fn(dout, din, |r, c| cols[c][r]);
    Isometry::new(m)
}

pub fn random_unitary<T: Scalar>(d: usize, seed: u64) -> Result<Isometry<T>> {
    random_isometry(d, d, seed)
}

/// Random isometry `din -> dout * k`, sliced into `k` Kraus operators:
/// `K_i[r, c] = V[r * k + i, c]`.
pub fn random_channel<T: Scalar>(
    din: usize,
    dout: usize,
    k: usize,
    seed: u64,
) -> Result<QuantumChannel<T>> {
    if k == 0 {
        return Err(Error::Parameter(
            "a channel needs at least one Kraus operator".into(),
        ));
    }
    if dout * k < din {
        return Err(Error::Parameter(format!(
            "dout * k = {} is below din = {din}",
            dout * k
        )));
    }
    let v = random_isometry::<T>(din, dout * k, seed)?;
    let kraus = (0..k)
        .map(|i| Matrix::from_fn(dout, din, |r, c| v.matrix[(r * k + i, c)]))
        .collect();
    QuantumChannel::new(kraus)
}
