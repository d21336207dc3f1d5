//! Floating-point abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar the analytics, optimizer and simulator are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances quoted throughout the crate
/// assume `f64`; `f32` is supported for throughput-oriented use where a few
/// digits suffice.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal. Never fails for finite or infinite input.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Gamma function, evaluated in double precision.
    #[inline]
    fn gamma_fn(self) -> Self {
        Self::lit(libm::tgamma(self.as_f64()))
    }

    /// `2^x - 1` without cancellation for small `x`.
    #[inline]
    fn exp2_m1(self) -> Self {
        (self * Self::LN_2()).exp_m1()
    }

    /// `log2(1 + x)` without cancellation for small `x`.
    #[inline]
    fn log2_1p(self) -> Self {
        self.ln_1p() / Self::LN_2()
    }

    /// Clamps to the closed unit interval; NaN passes through.
    #[inline]
    fn clamp_prob(self) -> Self {
        if self < Self::zero() {
            Self::zero()
        } else if self > Self::one() {
            Self::one()
        } else {
            self
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_space<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let last = T::lit((n - 1) as f64);
            (0..n)
                .map(|i| {
                    if i == 0 {
                        lo
                    } else if i == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * T::lit(i as f64) / last).exp()
                    }
                })
                .collect()
        }
    }
}

/// Linearly spaced points from `lo` to `hi` inclusive.
pub fn lin_space<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let last = T::lit((n - 1) as f64);
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        lo + (hi - lo) * T::lit(i as f64) / last
                    }
                })
                .collect()
        }
    }
}
