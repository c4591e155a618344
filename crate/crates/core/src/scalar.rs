use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the model is evaluated in.
///
/// Implemented for `f32` and `f64`. Every formula in the crate is written
/// against this trait, so a parameter set can be run in either precision.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Largest absolute value of a slice, zero for an empty slice.
pub(crate) fn sup_norm<T: Real>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}
