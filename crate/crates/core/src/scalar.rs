//! Real scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Complex number over the crate scalar.
pub type C<T> = Complex<T>;

/// Floating point type the linear algebra is generic over (`f32` or `f64`).
///
/// The associated constants carry the precision-dependent thresholds: the
/// relative eigenvalue cutoff that decides what counts as kernel, and the
/// tolerance used when admitting a matrix as a quantum state.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Sum
    + NumAssign
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    /// Eigenvalues at or below `SUPPORT_CUTOFF * max_eigenvalue` are zero.
    const SUPPORT_CUTOFF: f64;
    /// A matrix is a state if `min_eig >= -PSD_TOLERANCE * trace`.
    const PSD_TOLERANCE: f64;
    /// Trace slack for normalization and subnormalization tests.
    const TRACE_TOLERANCE: f64;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// A tolerance no tighter than what this precision can resolve.
    #[inline]
    fn tol(x: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(x).max(floor)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn cplx(re: Self, im: Self) -> C<Self> {
        Complex::new(re, im)
    }

    #[inline]
    fn real(re: Self) -> C<Self> {
        Complex::new(re, Self::zero())
    }
}

impl Scalar for f64 {
    const SUPPORT_CUTOFF: f64 = 1e-10;
    const PSD_TOLERANCE: f64 = 1e-9;
    const TRACE_TOLERANCE: f64 = 1e-9;
}

impl Scalar for f32 {
    const SUPPORT_CUTOFF: f64 = 1e-5;
    const PSD_TOLERANCE: f64 = 1e-5;
    const TRACE_TOLERANCE: f64 = 1e-5;
}

/// Binary logarithm; every entropy in this crate is measured in bits.
#[inline]
pub fn log2<T: Scalar>(x: T) -> T {
    x.log2()
}
