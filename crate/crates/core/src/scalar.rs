//! Numeric trait bound shared by the model, geometry and solvers.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar used for resource quantities, distances and QoE.
///
/// Integer-valued resource quantities are represented exactly by both `f32`
/// (up to 2^24) and `f64` (up to 2^53), so capacity checks on integer data
/// stay exact; `tolerance` only matters for genuinely fractional inputs.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Absolute tolerance for comparisons of resource loads and QoE sums.
    fn tolerance() -> Self;

    /// Lossy conversion from `f64`, used for literals and parsed input.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable in every Scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-4
    }
}
