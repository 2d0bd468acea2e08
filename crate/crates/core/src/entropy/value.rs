use std::fmt;

use serde::{Serialize, Serializer};

use crate::scalar::Scalar;

/// Why an entropy left the reals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Divergence {
    /// `supp(rho_B)` is not contained in `supp(sigma_B)`.
    SupportViolation {
        leakage: f64,
        cutoff_sensitive: bool,
    },
    /// No overlap at all between the supports (the trace functional is zero).
    NoOverlap,
    /// An infinite input propagated through a formula.
    Propagated,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::SupportViolation {
                leakage,
                cutoff_sensitive,
            } => {
                write!(f, "support violation (leakage {leakage:.3e}")?;
                if *cutoff_sensitive {
                    write!(f, ", verdict depends on the support cutoff")?;
                }
                write!(f, ")")
            }
            Divergence::NoOverlap => write!(f, "supports do not overlap"),
            Divergence::Propagated => write!(f, "infinite input"),
        }
    }
}

/// Extended real: a finite value or a signed infinity with its cause.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EntropyValue<T: Scalar> {
    Finite(T),
    NegInfinity(Divergence),
    PosInfinity(Divergence),
}

impl<T: Scalar> EntropyValue<T> {
    pub fn finite(&self) -> Option<T> {
        match self {
            EntropyValue::Finite(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, EntropyValue::Finite(_))
    }

    pub fn is_neg_infinite(&self) -> bool {
        matches!(self, EntropyValue::NegInfinity(_))
    }

    /// Finite value or the panic message `what`.
    pub fn expect_finite(&self, what: &str) -> T {
        self.finite().unwrap_or_else(|| panic!("{what}: {self}"))
    }

    /// Lossy view with IEEE infinities, for reporting only.
    pub fn to_f64(&self) -> f64 {
        match self {
            EntropyValue::Finite(v) => v.to_f64_lossy(),
            EntropyValue::NegInfinity(_) => f64::NEG_INFINITY,
            EntropyValue::PosInfinity(_) => f64::INFINITY,
        }
    }

    pub fn divergence(&self) -> Option<Divergence> {
        match self {
            EntropyValue::Finite(_) => None,
            EntropyValue::NegInfinity(d) | EntropyValue::PosInfinity(d) => Some(*d),
        }
    }

    pub fn neg(self) -> Self {
        match self {
            EntropyValue::Finite(v) => EntropyValue::Finite(-v),
            EntropyValue::NegInfinity(d) => EntropyValue::PosInfinity(d),
            EntropyValue::PosInfinity(d) => EntropyValue::NegInfinity(d),
        }
    }

    /// Adds a finite offset; infinities absorb it.
    pub fn add(self, x: T) -> Self {
        self.map(|v| v + x)
    }

    /// Multiplies by a positive factor.
    pub fn scale(self, k: T) -> Self {
        debug_assert!(k > T::zero());
        self.map(|v| v * k)
    }

    pub fn map(self, f: impl FnOnce(T) -> T) -> Self {
        match self {
            EntropyValue::Finite(v) => EntropyValue::Finite(f(v)),
            other => other,
        }
    }

    /// `self >= other - slack` in the extended order.
    pub fn ge_with_slack(&self, other: &Self, slack: T) -> bool {
        match (self, other) {
            (EntropyValue::PosInfinity(_), _) | (_, EntropyValue::NegInfinity(_)) => true,
            (_, EntropyValue::PosInfinity(_)) | (EntropyValue::NegInfinity(_), _) => false,
            (EntropyValue::Finite(a), EntropyValue::Finite(b)) => *a >= *b - slack,
        }
    }

    /// `self - other` when both are finite.
    pub fn finite_diff(&self, other: &Self) -> Option<T> {
        Some(self.finite()? - other.finite()?)
    }
}

impl<T: Scalar> fmt::Display for EntropyValue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntropyValue::Finite(v) => {
                if let Some(p) = f.precision() {
                    write!(f, "{v:.p$}")
                } else {
                    write!(f, "{v}")
                }
            }
            EntropyValue::NegInfinity(_) => write!(f, "-inf"),
            EntropyValue::PosInfinity(_) => write!(f, "inf"),
        }
    }
}

/// Finite values serialize as numbers, infinities as the strings
/// `"inf"` / `"-inf"`.
impl<T: Scalar> Serialize for EntropyValue<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            EntropyValue::Finite(v) => s.serialize_f64(v.to_f64_lossy()),
            EntropyValue::NegInfinity(_) => s.serialize_str("-inf"),
            EntropyValue::PosInfinity(_) => s.serialize_str("inf"),
        }
    }
}
