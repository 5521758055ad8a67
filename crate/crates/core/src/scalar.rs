//! Scalar abstraction shared by the analytic model, the intensity profile and
//! the imbalance statistics.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real number type the workload math is written against.
///
/// Implemented for `f32` and `f64`. Everything that touches trace files or
/// produces output artifacts is pinned to `f64`; the aliases at the crate
/// root name those instantiations.
pub trait Scalar: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Lossy conversion from `f64`, used for configuration constants.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 converts to every Scalar")
    }

    fn of_u64(v: u64) -> Self {
        Self::from_u64(v).expect("u64 converts to every Scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `|a - b| <= rel * max(|a|, |b|)`, treating two zeros as equal.
pub fn rel_eq<T: Scalar>(a: T, b: T, rel: T) -> bool {
    let scale = a.abs().max(b.abs());
    if scale == T::zero() {
        return true;
    }
    (a - b).abs() <= rel * scale
}
