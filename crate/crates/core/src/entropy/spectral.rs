//! Closed-form conditional entropies relative to a fixed `sigma_B`, all read
//! off the joint spectral data of `rho_AB` and `1_A ⊗ sigma_B`.

use num_traits::Zero;

use super::value::{Divergence, EntropyValue};
use crate::error::{Error, Result};
use crate::linops::{eig, support_threshold};
use crate::scalar::{log2, Scalar};
use crate::state::{DensityOperator, SupportCheck};

/// Overlap weights below this are treated as zero in the `H_∞` maximum.
const OVERLAP_FLOOR: f64 = 1e-12;

/// Eigenvalues `nu_i` of `rho_AB` (support only), `mu_j` of `sigma_B`, and
/// `w[i][j] = <i| 1_A ⊗ |j><j| |i>`, the weight eigenvector `|i>` of
/// `rho` puts on the eigenspace `1_A ⊗ |j>` of `1_A ⊗ sigma`.
#[derive(Clone, Debug)]
pub struct ConditionalSpectra<T: Scalar> {
    pub nu: Vec<T>,
    pub mu: Vec<T>,
    /// `mu[j]` above the support cutoff.
    pub mu_in_support: Vec<bool>,
    /// Row-major `nu.len() x mu.len()`.
    pub w: Vec<T>,
    pub support: SupportCheck,
}

impl<T: Scalar> ConditionalSpectra<T> {
    pub fn new(rho: &DensityOperator<T>, sigma: &DensityOperator<T>) -> Result<Self> {
        rho.check_conditioning(sigma)?;
        let da = rho.dim_a();
        let db = rho.dim_b();
        let rs = eig(rho.matrix())?;
        let ss = eig(sigma.matrix())?;
        let rho_cut = support_threshold(&rs.values, T::lit(T::SUPPORT_CUTOFF));
        let sig_cut = support_threshold(&ss.values, T::lit(T::SUPPORT_CUTOFF));
        let mu: Vec<T> = ss.values.iter().map(|v| v.max(T::zero())).collect();
        let mu_in_support: Vec<bool> = mu.iter().map(|v| *v > sig_cut && *v > T::zero()).collect();

        let u = &ss.vectors;
        let mut nu = Vec::new();
        let mut w = Vec::new();
        let mut leak = T::zero();
        let mut total = T::zero();
        let mut coef = vec![num_complex::Complex::<T>::zero(); db];
        for (i, &v) in rs.values.iter().enumerate() {
            if !(v > T::zero()) {
                continue;
            }
            let mut row = vec![T::zero(); db];
            for a in 0..da {
                coef.iter_mut()
                    .for_each(|c| *c = num_complex::Complex::zero());
                for b in 0..db {
                    let psi = rs.vectors[(a * db + b, i)];
                    if psi.re == T::zero() && psi.im == T::zero() {
                        continue;
                    }
                    let urow = u.row(b);
                    for (c, ub) in coef.iter_mut().zip(urow) {
                        *c += ub.conj() * psi;
                    }
                }
                for (r, c) in row.iter_mut().zip(&coef) {
                    *r += c.norm_sqr();
                }
            }
            total += v;
            for j in 0..db {
                if !mu_in_support[j] {
                    leak += v * row[j];
                }
            }
            if v > rho_cut {
                nu.push(v);
                w.extend(row);
            }
        }
        let rel = if total > T::zero() {
            (leak / total).to_f64_lossy()
        } else {
            0.0
        };
        let cutoff = T::SUPPORT_CUTOFF;
        let support = SupportCheck {
            leakage: rel,
            violated: rel > cutoff,
            cutoff_sensitive: rel > cutoff * 1e-3 && rel < cutoff * 1e3,
        };
        Ok(Self {
            nu,
            mu,
            mu_in_support,
            w,
            support,
        })
    }

    #[inline]
    fn weight(&self, i: usize, j: usize) -> T {
        self.w[i * self.mu.len() + j]
    }

    fn violation(&self) -> Divergence {
        Divergence::SupportViolation {
            leakage: self.support.leakage,
            cutoff_sensitive: self.support.cutoff_sensitive,
        }
    }

    /// `tr(rho^alpha (1 ⊗ sigma)^{1-alpha})` over the supports.
    pub fn trace_functional(&self, alpha: T) -> T {
        let one_minus = T::one() - alpha;
        let mut q = T::zero();
        for (i, &n) in self.nu.iter().enumerate() {
            let na = n.powf(alpha);
            for (j, &m) in self.mu.iter().enumerate() {
                if self.mu_in_support[j] {
                    q += na * m.powf(one_minus) * self.weight(i, j);
                }
            }
        }
        q
    }

    pub fn h_alpha(&self, alpha: T) -> Result<EntropyValue<T>> {
        check_alpha(alpha)?;
        if alpha > T::one() && self.support.violated {
            return Ok(EntropyValue::NegInfinity(self.violation()));
        }
        let q = self.trace_functional(alpha);
        if !(q > T::zero()) {
            return Ok(EntropyValue::NegInfinity(Divergence::NoOverlap));
        }
        Ok(EntropyValue::Finite(log2(q) / (T::one() - alpha)))
    }

    pub fn h_vn(&self) -> EntropyValue<T> {
        if self.support.violated {
            return EntropyValue::NegInfinity(self.violation());
        }
        let mut acc = T::zero();
        for (i, &n) in self.nu.iter().enumerate() {
            let mut cross = T::zero();
            for (j, &m) in self.mu.iter().enumerate() {
                if self.mu_in_support[j] {
                    cross += self.weight(i, j) * log2(m);
                }
            }
            acc += n * (cross - log2(n));
        }
        EntropyValue::Finite(acc)
    }

    pub fn h_inf(&self) -> EntropyValue<T> {
        if self.support.violated {
            return EntropyValue::NegInfinity(self.violation());
        }
        let floor = T::lit(OVERLAP_FLOOR);
        let mut best = T::zero();
        for (i, &n) in self.nu.iter().enumerate() {
            for (j, &m) in self.mu.iter().enumerate() {
                if self.mu_in_support[j] && self.weight(i, j) > floor {
                    best = best.max(n / m);
                }
            }
        }
        if best > T::zero() {
            EntropyValue::Finite(-log2(best))
        } else {
            EntropyValue::NegInfinity(Divergence::NoOverlap)
        }
    }

    /// `log tr(Pi_rho (1 ⊗ sigma))`.
    pub fn h_zero(&self) -> EntropyValue<T> {
        let mut acc = T::zero();
        for i in 0..self.nu.len() {
            for (j, &m) in self.mu.iter().enumerate() {
                acc += m * self.weight(i, j);
            }
        }
        if acc > T::zero() {
            EntropyValue::Finite(log2(acc))
        } else {
            EntropyValue::NegInfinity(Divergence::NoOverlap)
        }
    }

    pub fn upsilon(&self) -> Result<Upsilon<T>> {
        let h32 = self.h_alpha(T::lit(1.5))?;
        let h12 = self.h_alpha(T::lit(0.5))?;
        Ok(Upsilon::from_entropies(h32, h12))
    }
}

pub(crate) fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if alpha.is_nan() || alpha <= T::zero() {
        return Err(Error::Parameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if alpha == T::one() {
        return Err(Error::Parameter(
            "alpha = 1 is the von Neumann entropy; use h_vn_rel".into(),
        ));
    }
    if alpha.is_infinite() {
        return Err(Error::Parameter(
            "alpha = inf is the H_inf entropy; use h_inf_rel".into(),
        ));
    }
    Ok(())
}

/// `eta = 2^{-H_{3/2}/2} + 2^{H_{1/2}/2} + 1` with its terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Upsilon<T: Scalar> {
    pub h_three_halves: EntropyValue<T>,
    pub h_half: EntropyValue<T>,
    /// `2^{-H_{3/2}/2}`; infinite when `H_{3/2} = -inf`.
    pub first: EntropyValue<T>,
    /// `2^{H_{1/2}/2}`.
    pub second: T,
    pub eta: EntropyValue<T>,
}

impl<T: Scalar> Upsilon<T> {
    pub fn from_entropies(h32: EntropyValue<T>, h12: EntropyValue<T>) -> Self {
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        let first = match h32 {
            EntropyValue::Finite(h) => EntropyValue::Finite(two.powf(-half * h)),
            EntropyValue::NegInfinity(d) => EntropyValue::PosInfinity(d),
            EntropyValue::PosInfinity(_) => EntropyValue::Finite(T::zero()),
        };
        let second = match h12 {
            EntropyValue::Finite(h) => two.powf(half * h),
            EntropyValue::NegInfinity(_) => T::zero(),
            EntropyValue::PosInfinity(_) => T::infinity(),
        };
        let eta = first.map(|f| f + second + T::one());
        Self {
            h_three_halves: h32,
            h_half: h12,
            first,
            second,
            eta,
        }
    }
}
