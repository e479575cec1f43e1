//! Scalar abstractions shared by the analytic parts of the crate.
//!
//! Closed-form channel formulas and interval estimates are written against
//! [`Real`] so they work for `f32` and `f64`. The Bell-class enumeration in
//! [`crate::oracle`] only needs field arithmetic and is written against
//! [`Field`], which also admits exact rationals.

use num_traits::{Float, FromPrimitive, Num};

/// Floating point scalar: `f32` or `f64`.
pub trait Real: Float + FromPrimitive + std::fmt::Debug + Send + Sync + 'static {
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in target float")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Exact or approximate field arithmetic, enough for probability tables.
pub trait Field: Num + Clone + PartialOrd + std::fmt::Debug {}

impl<T: Num + Clone + PartialOrd + std::fmt::Debug> Field for T {}
