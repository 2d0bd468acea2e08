//! The functional `S_f(A, B) = lim_{ξ→0} Σ_ij (μ_j + ξ) f(λ_i / (μ_j + ξ)) |<i|j>|²`
//! and the Jensen-type inequalities behind its monotonicity.

use std::fmt;
use std::sync::Arc;

use crate::entropy::{Divergence, EntropyValue};
use crate::error::{Error, Result};
use crate::linops::{
    eig, eigvals, hermitian_function, matrix_function, support_threshold, HermitianMatrix,
};
use crate::scalar::{log2, Scalar, C};
use crate::state::{Isometry, QuantumChannel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvexityClass {
    OperatorConvex,
    OperatorConcave,
    Convex,
    General,
}

/// `lim_{ξ→0} ξ f(λ/ξ)` for `λ > 0`: the contribution of weight that
/// `A` places on the kernel of `B`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelLimit {
    Zero,
    PlusInfinity,
    MinusInfinity,
    /// `c λ`.
    Linear(f64),
}

/// Continuous `f: [0, ∞) → R` with `f(0) = 0`.
#[derive(Clone)]
pub struct ScalarFunction<T: Scalar> {
    name: String,
    eval: Arc<dyn Fn(T) -> T + Send + Sync>,
    class: ConvexityClass,
    kernel: KernelLimit,
}

impl<T: Scalar> fmt::Debug for ScalarFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("name", &self.name)
            .field("class", &self.class)
            .field("kernel", &self.kernel)
            .finish()
    }
}

impl<T: Scalar> ScalarFunction<T> {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(T) -> T + Send + Sync + 'static,
        class: ConvexityClass,
        kernel: KernelLimit,
    ) -> Result<Self> {
        let name = name.into();
        let at_zero = eval(T::zero());
        if at_zero != T::zero() {
            return Err(Error::Contract(format!(
                "{name}(0) = {at_zero}, must be exactly 0"
            )));
        }
        Ok(Self {
            name,
            eval: Arc::new(eval),
            class,
            kernel,
        })
    }

    /// `t ↦ t^α`, `α > 0`. Operator convex on `[1, 2]`, operator concave on `(0, 1]`.
    pub fn power(alpha: T) -> Result<Self> {
        if !(alpha > T::zero()) {
            return Err(Error::Parameter(format!(
                "power needs alpha > 0, got {alpha}"
            )));
        }
        let one = T::one();
        let two = T::lit(2.0);
        let class = if alpha >= one && alpha <= two {
            ConvexityClass::OperatorConvex
        } else if alpha <= one {
            ConvexityClass::OperatorConcave
        } else {
            ConvexityClass::Convex
        };
        let kernel = if alpha > one {
            KernelLimit::PlusInfinity
        } else if alpha < one {
            KernelLimit::Zero
        } else {
            KernelLimit::Linear(1.0)
        };
        Self::new(
            format!("t^{alpha}"),
            move |t: T| {
                if t == T::zero() {
                    T::zero()
                } else {
                    t.powf(alpha)
                }
            },
            class,
            kernel,
        )
    }

    /// `t ↦ t log t` (bits), operator convex.
    pub fn x_log_x() -> Self {
        Self::new(
            "t log t",
            |t: T| {
                if t > T::zero() {
                    t * log2(t)
                } else {
                    T::zero()
                }
            },
            ConvexityClass::OperatorConvex,
            KernelLimit::PlusInfinity,
        )
        .expect("0 log 0 = 0")
    }

    /// `t ↦ -t log t` (bits), operator concave.
    pub fn neg_x_log_x() -> Self {
        Self::new(
            "-t log t",
            |t: T| {
                if t > T::zero() {
                    -t * log2(t)
                } else {
                    T::zero()
                }
            },
            ConvexityClass::OperatorConcave,
            KernelLimit::MinusInfinity,
        )
        .expect("0 log 0 = 0")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn class(&self) -> ConvexityClass {
        self.class
    }

    pub fn kernel_limit(&self) -> KernelLimit {
        self.kernel
    }

    #[inline]
    pub fn eval(&self, t: T) -> T {
        (self.eval)(t)
    }
}

/// Spectral form of `S_f(A, B)` with analytic kernel limits.
pub fn s_f<T: Scalar>(
    a: &HermitianMatrix<T>,
    b: &HermitianMatrix<T>,
    f: &ScalarFunction<T>,
) -> Result<EntropyValue<T>> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!(
            "S_f on dims {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let sa = eig(a)?;
    let sb = eig(b)?;
    let cut_a = support_threshold(&sa.values, T::lit(T::SUPPORT_CUTOFF));
    let cut_b = support_threshold(&sb.values, T::lit(T::SUPPORT_CUTOFF));
    let n = a.dim();
    let mut finite = T::zero();
    let mut kernel_mass = T::zero();
    let mut total = T::zero();
    for (i, &lam) in sa.values.iter().enumerate() {
        if !(lam > cut_a) || lam <= T::zero() {
            continue;
        }
        total += lam;
        for (j, &mu) in sb.values.iter().enumerate() {
            let overlap: C<T> = (0..n)
                .map(|k| sa.vectors[(k, i)].conj() * sb.vectors[(k, j)])
                .sum();
            let w = overlap.norm_sqr();
            if mu > cut_b && mu > T::zero() {
                finite += mu * f.eval(lam / mu) * w;
            } else {
                kernel_mass += lam * w;
            }
        }
    }
    let significant = total > T::zero() && kernel_mass > T::lit(T::SUPPORT_CUTOFF) * total;
    Ok(match f.kernel {
        KernelLimit::Zero => EntropyValue::Finite(finite),
        KernelLimit::Linear(c) => EntropyValue::Finite(finite + T::lit(c) * kernel_mass),
        KernelLimit::PlusInfinity if significant => {
            EntropyValue::PosInfinity(kernel_divergence(kernel_mass, total))
        }
        KernelLimit::MinusInfinity if significant => {
            EntropyValue::NegInfinity(kernel_divergence(kernel_mass, total))
        }
        _ => EntropyValue::Finite(finite),
    })
}

fn kernel_divergence<T: Scalar>(mass: T, total: T) -> Divergence {
    let rel = (mass / total).to_f64_lossy();
    let cut = T::SUPPORT_CUTOFF;
    Divergence::SupportViolation {
        leakage: rel,
        cutoff_sensitive: rel > cut * 1e-3 && rel < cut * 1e3,
    }
}

const JENSEN_SLACK: f64 = 1e-9;
const OPERATOR_SLACK: f64 = 1e-8;
const MONOTONE_SLACK: f64 = 1e-8;

/// `<φ|f(X)|φ> - f(<φ|X|φ>)` for `f` convex on `[lo, hi]`.
pub fn jensen_gap<T: Scalar>(
    f: impl Fn(T) -> T,
    domain: (T, T),
    x: &HermitianMatrix<T>,
    phi: &[C<T>],
) -> Result<T> {
    if phi.len() != x.dim() {
        return Err(Error::Shape(format!(
            "vector of length {} for a dim {} operator",
            phi.len(),
            x.dim()
        )));
    }
    let norm: T = phi.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if (norm - T::one()).abs() > T::tol(1e-9) {
        return Err(Error::Parameter(format!(
            "phi must be a unit vector, has norm {norm}"
        )));
    }
    let ev = eigvals(x)?;
    let (lo, hi) = domain;
    if ev[0] < lo || *ev.last().expect("non-empty") > hi {
        return Err(Error::Parameter(format!(
            "spectrum [{}, {}] leaves the domain [{lo}, {hi}]",
            ev[0],
            ev.last().expect("non-empty")
        )));
    }
    let fx = hermitian_function(x, &f)?;
    Ok(fx.expectation(phi) - f(x.expectation(phi)))
}

pub fn check_jensen<T: Scalar>(
    f: impl Fn(T) -> T,
    domain: (T, T),
    x: &HermitianMatrix<T>,
    phi: &[C<T>],
) -> Result<bool> {
    Ok(jensen_gap(f, domain, x, phi)? >= -T::lit(JENSEN_SLACK))
}

/// `λ_min(ν^dag f(C) ν - f(ν^dag C ν))`, sign-flipped for operator concave `f`.
pub fn operator_jensen_margin<T: Scalar>(
    f: &ScalarFunction<T>,
    nu: &Isometry<T>,
    c: &HermitianMatrix<T>,
) -> Result<T> {
    let sign = match f.class {
        ConvexityClass::OperatorConvex => T::one(),
        ConvexityClass::OperatorConcave => -T::one(),
        other => {
            return Err(Error::Contract(format!(
                "{} is tagged {other:?}, not operator convex/concave",
                f.name
            )));
        }
    };
    if c.dim() != nu.dout() {
        return Err(Error::Shape(format!(
            "isometry output dim {} vs operator dim {}",
            nu.dout(),
            c.dim()
        )));
    }
    let fc = matrix_function(c, |t| f.eval(t), false)?;
    let adj = nu.matrix().adjoint();
    let lhs = fc.conjugate_by(&adj);
    let compressed = c.conjugate_by(&adj);
    let rhs = matrix_function(&compressed, |t| f.eval(t), false)?;
    let diff = lhs.sub(&rhs).scale(sign);
    Ok(eigvals(&diff)?[0])
}

pub fn check_operator_jensen<T: Scalar>(
    f: &ScalarFunction<T>,
    nu: &Isometry<T>,
    c: &HermitianMatrix<T>,
) -> Result<bool> {
    Ok(operator_jensen_margin(f, nu, c)? >= -T::lit(OPERATOR_SLACK))
}

/// `S_f(A, B) - S_f(E(A), E(B))` (reversed for operator concave `f`).
pub fn monotonicity_margin<T: Scalar>(
    a: &HermitianMatrix<T>,
    b: &HermitianMatrix<T>,
    channel: &QuantumChannel<T>,
    f: &ScalarFunction<T>,
) -> Result<EntropyValue<T>> {
    let before = s_f(a, b, f)?;
    let after = s_f(&channel.apply_operator(a)?, &channel.apply_operator(b)?, f)?;
    let (hi, lo) = match f.class {
        ConvexityClass::OperatorConvex => (before, after),
        ConvexityClass::OperatorConcave => (after, before),
        other => {
            return Err(Error::Contract(format!(
                "{} is tagged {other:?}, not operator convex/concave",
                f.name
            )));
        }
    };
    Ok(match (hi, lo) {
        (EntropyValue::Finite(x), EntropyValue::Finite(y)) => EntropyValue::Finite(x - y),
        (EntropyValue::PosInfinity(d), _) | (_, EntropyValue::NegInfinity(d)) => {
            EntropyValue::PosInfinity(d)
        }
        (_, EntropyValue::PosInfinity(d)) | (EntropyValue::NegInfinity(d), _) => {
            EntropyValue::NegInfinity(d)
        }
    })
}

pub fn check_monotonicity<T: Scalar>(
    a: &HermitianMatrix<T>,
    b: &HermitianMatrix<T>,
    channel: &QuantumChannel<T>,
    f: &ScalarFunction<T>,
) -> Result<bool> {
    let m = monotonicity_margin(a, b, channel, f)?;
    Ok(m.ge_with_slack(&EntropyValue::Finite(T::zero()), T::lit(MONOTONE_SLACK)))
}
