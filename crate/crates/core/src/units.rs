//! Conversions between logarithmic configuration units and the linear
//! quantities used internally.

use crate::scalar::Scalar;

/// dBm to watts: `10^(x/10) * 1e-3`.
pub fn dbm_to_watts<T: Scalar>(x_dbm: T) -> T {
    db_to_linear(x_dbm - T::lit(30.0))
}

pub fn watts_to_dbm<T: Scalar>(watts: T) -> T {
    linear_to_db(watts) + T::lit(30.0)
}

/// Decibels relative to one. Used for the dimensionless SI suppression
/// factor and the mode-switch threshold.
pub fn db_to_linear<T: Scalar>(x_db: T) -> T {
    T::lit(10.0).powf(x_db / T::lit(10.0))
}

pub fn linear_to_db<T: Scalar>(x: T) -> T {
    T::lit(10.0) * x.log10()
}
