//! Scalar abstraction for soft values.
//!
//! Decoders, channel models and combiners are written against [`Llr`] so the
//! same code runs in `f64` (reference precision, used by the exactness tests
//! and EXIT analysis) and `f32` (faster Monte Carlo runs).

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Magnitude used for "known" bits (dummy bits, saturated priors), natural-log
/// domain.
pub const LLR_SATURATION: f64 = 64.0;

/// Floating point type usable as a log-likelihood ratio.
pub trait Llr:
    Float + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static
{
    /// Saturation magnitude in this scalar type.
    fn saturation() -> Self {
        Self::from_f64(LLR_SATURATION).unwrap()
    }

    /// Clamp to `[-saturation, +saturation]`.
    #[inline]
    fn saturate(self) -> Self {
        let s = Self::saturation();
        if self > s {
            s
        } else if self < -s {
            -s
        } else {
            self
        }
    }

    /// Jacobian logarithm `ln(e^a + e^b)`.
    #[inline]
    fn max_star(self, other: Self) -> Self {
        let (hi, lo) = if self >= other {
            (self, other)
        } else {
            (other, self)
        };
        if lo == Self::neg_infinity() {
            return hi;
        }
        hi + (lo - hi).exp().ln_1p()
    }

    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).unwrap()
    }
}

impl Llr for f32 {}
impl Llr for f64 {}
