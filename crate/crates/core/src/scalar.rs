use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Floating-point type used by the analysis engine.
///
/// Implemented for `f32` and `f64`. The convergence tolerance scales with the
/// precision of the type: `f64` reaches the 1e-12 residual used throughout the
/// analysis, `f32` settles for what its mantissa can express.
pub trait Scalar: Float + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static {
    /// Residual below which an iterative solve counts as converged.
    fn convergence_tolerance() -> Self;

    fn from_count(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("u64 is representable as a float")
    }

    fn from_f64_lossy(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite f64 is representable")
    }

    fn ln4() -> Self {
        Self::from_f64_lossy(std::f64::consts::LN_2 * 2.0)
    }
}

impl Scalar for f64 {
    fn convergence_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn convergence_tolerance() -> Self {
        1e-6
    }
}
